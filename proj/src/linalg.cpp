#include "nonlocal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

namespace nonlocal {

double norm_inf(const Matrix& a) {
    if (a.size() == 0)
        return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

DenseLU::DenseLU(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("DenseLU: matrix must be square");
    if (a.rows() == 0)
        throw std::invalid_argument("DenseLU: empty matrix");
    if (!a.allFinite())
        throw std::invalid_argument("DenseLU: matrix has non-finite entries");
    lu_.compute(a);
    const double scale = norm_inf(a);
    const double threshold =
        static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * scale;
    const auto pivots = lu_.matrixLU().diagonal().cwiseAbs();
    if (!(pivots.minCoeff() > threshold))
        throw singular_matrix_error("DenseLU: matrix is singular to working precision");
}

Vector DenseLU::solve(const Vector& b) const {
    if (b.size() != lu_.rows())
        throw std::invalid_argument("DenseLU::solve: right-hand side size mismatch");
    return lu_.solve(b);
}

Matrix DenseLU::inverse() const { return lu_.inverse(); }

Vector lu_solve(const Matrix& a, const Vector& b) {
    if (b.size() != a.rows())
        throw std::invalid_argument("lu_solve: right-hand side size mismatch");
    return DenseLU(a).solve(b);
}

void KroneckerOperator::validate() const {
    if (g_alpha.rows() != d_alpha.size() || g_alpha.cols() != d_alpha.size())
        throw std::invalid_argument("KroneckerOperator: G_alpha must match D_alpha");
    if (g_beta.rows() != d_beta.size() || g_beta.cols() != d_beta.size())
        throw std::invalid_argument("KroneckerOperator: G_beta must match D_beta");
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Vector kron_matvec(const KroneckerOperator& op, const Vector& v) {
    op.validate();
    if (v.size() != op.size())
        throw std::invalid_argument("kron_matvec: vector length must be n_alpha * n_beta");
    const Eigen::Index na = op.d_alpha.size();
    const Eigen::Index nb = op.d_beta.size();
    Eigen::Map<const RowMajorMatrix> grid(v.data(), na, nb);
    RowMajorMatrix out = (op.d_alpha * op.d_beta.transpose()).cwiseProduct(grid);
    out.noalias() -= op.g_alpha * grid * op.g_beta.transpose();
    return Eigen::Map<const Vector>(out.data(), out.size());
}

Matrix kron_dense(const KroneckerOperator& op) {
    op.validate();
    const Eigen::Index na = op.d_alpha.size();
    const Eigen::Index nb = op.d_beta.size();
    Matrix dense(na * nb, na * nb);
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < na; ++j)
            dense.block(i * nb, j * nb, nb, nb) = -op.g_alpha(i, j) * op.g_beta;
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index k = 0; k < nb; ++k)
            dense(i * nb + k, i * nb + k) += op.d_alpha[i] * op.d_beta[k];
    return dense;
}

KrylovResult krylov_solve(const LinearOperator& apply, const Vector& b, double tol, int max_iter,
                          const KrylovOptions& options) {
    if (!(tol > 0.0))
        throw std::invalid_argument("krylov_solve: tolerance must be positive");
    if (max_iter < 1)
        throw std::invalid_argument("krylov_solve: max_iter must be positive");
    const Eigen::Index n = b.size();
    const Vector& scaling = options.right_scaling;
    if (scaling.size() != 0 && scaling.size() != n)
        throw std::invalid_argument("krylov_solve: scaling size mismatch");
    if (options.initial_guess.size() != 0 && options.initial_guess.size() != n)
        throw std::invalid_argument("krylov_solve: initial guess size mismatch");

    auto scaled = [&](const Vector& y) -> Vector {
        return scaling.size() != 0 ? Vector(scaling.cwiseProduct(y)) : y;
    };

    KrylovResult result;
    result.x = options.initial_guess.size() != 0 ? options.initial_guess : Vector::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        result.x.setZero();
        return result;
    }

    Vector r = b - apply(result.x);
    if (r.size() != n)
        throw std::invalid_argument("krylov_solve: operator output size mismatch");
    double rnorm = r.norm();
    if (rnorm <= tol * bnorm) {
        result.relative_residual = rnorm / bnorm;
        return result;
    }

    const Eigen::Index m = std::max<Eigen::Index>(1, std::min<Eigen::Index>(options.restart, n));
    int total = 0;
    for (;;) {
        Matrix basis(n, m + 1);
        Matrix hess = Matrix::Zero(m + 1, m);
        Vector cs = Vector::Zero(m);
        Vector sn = Vector::Zero(m);
        Vector g = Vector::Zero(m + 1);
        basis.col(0) = r / rnorm;
        g[0] = rnorm;

        Eigen::Index cols = 0;
        while (cols < m && total < max_iter) {
            const Eigen::Index j = cols;
            ++total;
            Vector w = apply(scaled(basis.col(j)));
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index i = 0; i <= j; ++i) {
                    const double c = basis.col(i).dot(w);
                    hess(i, j) += c;
                    w -= c * basis.col(i);
                }
            }
            const double next = w.norm();
            hess(j + 1, j) = next;
            for (Eigen::Index i = 0; i < j; ++i) {
                const double t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
                hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
                hess(i, j) = t;
            }
            const double denom = std::hypot(hess(j, j), hess(j + 1, j));
            if (denom == 0.0) {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = hess(j, j) / denom;
                sn[j] = hess(j + 1, j) / denom;
            }
            hess(j, j) = cs[j] * hess(j, j) + sn[j] * hess(j + 1, j);
            hess(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            ++cols;

            if (next <= std::numeric_limits<double>::min())
                break; // lucky breakdown; the true residual decides below
            basis.col(j + 1) = w / next;
            if (std::abs(g[j + 1]) <= tol * bnorm)
                break;
        }

        if (cols > 0) {
            const Vector y = hess.topLeftCorner(cols, cols)
                                 .triangularView<Eigen::Upper>()
                                 .solve(g.head(cols));
            result.x += scaled(basis.leftCols(cols) * y);
        }
        r = b - apply(result.x);
        rnorm = r.norm();
        result.iterations = total;
        result.relative_residual = rnorm / bnorm;
        if (rnorm <= tol * bnorm)
            return result;
        if (total >= max_iter)
            throw convergence_error("krylov_solve: no convergence within " +
                                        std::to_string(max_iter) + " iterations",
                                    total, result.relative_residual);
    }
}

SpectrumProbe extreme_eigs_symmetric(const Matrix& h, double residual_tol) {
    const Eigen::Index n = h.rows();
    if (n == 0 || h.cols() != n)
        throw std::invalid_argument("extreme_eigs_symmetric: matrix must be square and non-empty");
    const double hnorm = norm_inf(h);
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, hnorm))
        throw std::invalid_argument("extreme_eigs_symmetric: matrix is not symmetric");

    SpectrumProbe probe;
    if (n == 1) {
        probe.lambda_min = probe.lambda_max = h(0, 0);
        probe.v_min = probe.v_max = Vector::Ones(1);
        probe.iterations = 1;
        return probe;
    }

    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    auto random_orthogonal = [&](const Matrix& basis, Eigen::Index used) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = normal(rng);
        for (int pass = 0; pass < 2; ++pass)
            if (used > 0)
                v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
        return Vector(v / v.norm());
    };

    Matrix q(n, n);
    q.col(0) = random_orthogonal(q, 0);
    Vector alphas(n);
    Vector betas = Vector::Zero(n);

    auto ritz = [&](Eigen::Index steps, bool& converged) {
        Eigen::SelfAdjointEigenSolver<Matrix> tri;
        tri.computeFromTridiagonal(alphas.head(steps), betas.head(steps - 1),
                                   Eigen::ComputeEigenvectors);
        const Vector y_min = q.leftCols(steps) * tri.eigenvectors().col(0);
        const Vector y_max = q.leftCols(steps) * tri.eigenvectors().col(steps - 1);
        auto refine = [&](const Vector& y, double& lambda, double& residual) {
            const Vector hy = h * y;
            const double yy = y.squaredNorm();
            lambda = y.dot(hy) / yy;
            residual = (hy - lambda * y).norm() / std::sqrt(yy);
        };
        refine(y_min, probe.lambda_min, probe.residual_min);
        refine(y_max, probe.lambda_max, probe.residual_max);
        probe.v_min = y_min;
        probe.v_max = y_max;
        probe.iterations = static_cast<int>(steps);
        converged = probe.residual_min <= residual_tol && probe.residual_max <= residual_tol;
    };

    for (Eigen::Index m = 0; m < n; ++m) {
        Vector w = h * q.col(m);
        alphas[m] = q.col(m).dot(w);
        for (int pass = 0; pass < 2; ++pass)
            w -= q.leftCols(m + 1) * (q.leftCols(m + 1).transpose() * w);
        const double beta = w.norm();
        const Eigen::Index steps = m + 1;

        // cheap estimate from the tridiagonal before paying for Ritz vectors
        if (steps == n || steps % 10 == 0) {
            Eigen::SelfAdjointEigenSolver<Matrix> tri;
            tri.computeFromTridiagonal(alphas.head(steps), betas.head(steps - 1),
                                       Eigen::ComputeEigenvectors);
            const double est_min = beta * std::abs(tri.eigenvectors()(steps - 1, 0));
            const double est_max = beta * std::abs(tri.eigenvectors()(steps - 1, steps - 1));
            if (steps == n || std::max(est_min, est_max) <= 0.1 * residual_tol) {
                bool converged = false;
                ritz(steps, converged);
                if (converged)
                    return probe;
            }
        }
        if (steps == n)
            break;
        if (beta <= 1e-13 * std::max(1.0, hnorm)) {
            betas[m] = 0.0;
            q.col(m + 1) = random_orthogonal(q, m + 1);
        } else {
            betas[m] = beta;
            q.col(m + 1) = w / beta;
        }
    }
    throw convergence_error("extreme_eigs_symmetric: Ritz residuals above tolerance",
                            probe.iterations, std::max(probe.residual_min, probe.residual_max));
}

double condition_inf(const Matrix& a) {
    const DenseLU lu(a);
    return norm_inf(a) * norm_inf(lu.inverse());
}

} // namespace nonlocal
