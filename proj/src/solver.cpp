#include "nonlocal/solver.hpp"

#include <algorithm>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nonlocal {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double relative_residual(const Matrix& a, const Vector& x, const Vector& b) {
    const double scale = norm_inf(a) * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
    if (scale == 0.0)
        return 0.0;
    return (a * x - b).lpNorm<Eigen::Infinity>() / scale;
}

} // namespace

void TimeGrid::validate() const {
    if (steps < 1)
        throw std::invalid_argument("TimeGrid: need at least one step");
    if (!(final_time > 0.0))
        throw std::invalid_argument("TimeGrid: final time must be positive");
}

SolveResult solve_steady(const StiffnessMatrix& a, const Vector& forcing) {
    const auto start = Clock::now();
    if (forcing.size() != a.size())
        throw std::invalid_argument("solve_steady: forcing length must be 2N-1");
    SolveResult result;
    try {
        result.values = lu_solve(a.entries, forcing);
    } catch (const singular_matrix_error& e) {
        // the stiffness matrix is a nonsingular M-matrix; reaching this is a bug
        throw std::logic_error(std::string("solve_steady: stiffness matrix singular: ") + e.what());
    }
    result.residual = relative_residual(a.entries, result.values, forcing);
    result.wall_seconds = seconds_since(start);
    return result;
}

SolveResult solve_steady(const GradedMesh& mesh, double alpha, const ScalarFunction& f) {
    const auto a = assemble(mesh, alpha);
    Vector forcing(a.size());
    const auto xs = mesh.interior_nodes();
    for (std::size_t i = 0; i < xs.size(); ++i)
        forcing[static_cast<Eigen::Index>(i)] = f(xs[i]);
    return solve_steady(a, forcing);
}

SolveResult evolve_1d(const GradedMesh& mesh, double alpha, const TimeGrid& grid,
                      const NodalForcing& f, const ScalarFunction& u0,
                      const StepObserver& observer) {
    grid.validate();
    const auto start = Clock::now();
    const auto a = assemble(mesh, alpha);
    const Eigen::Index n = a.size();
    const double tau = grid.tau();

    const Matrix identity = Matrix::Identity(n, n);
    const Matrix implicit_part = identity + 0.5 * tau * a.entries;
    const Matrix explicit_part = identity - 0.5 * tau * a.entries;
    const DenseLU lu(implicit_part);

    SolveResult result;
    result.values.resize(n);
    const auto xs = mesh.interior_nodes();
    for (Eigen::Index i = 0; i < n; ++i)
        result.values[i] = u0(xs[static_cast<std::size_t>(i)]);

    Vector load(n);
    for (std::size_t j = 1; j <= grid.steps; ++j) {
        const double t_half = (static_cast<double>(j) - 0.5) * tau;
        f(t_half, std::span<double>(load.data(), static_cast<std::size_t>(n)));
        const Vector rhs = explicit_part * result.values + tau * load;
        result.values = lu.solve(rhs);
        result.residual =
            std::max(result.residual, relative_residual(implicit_part, result.values, rhs));
        if (observer)
            observer(j, grid.time(j), result.values);
    }
    result.wall_seconds = seconds_since(start);
    return result;
}

SolveResult evolve_1d(const GradedMesh& mesh, double alpha, const TimeGrid& grid,
                      const std::function<double(double, double)>& f, const ScalarFunction& u0,
                      const StepObserver& observer) {
    const std::vector<double> xs(mesh.interior_nodes().begin(), mesh.interior_nodes().end());
    const NodalForcing nodal = [&f, xs](double t, std::span<double> out) {
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] = f(xs[i], t);
    };
    return evolve_1d(mesh, alpha, grid, nodal, u0, observer);
}

KroneckerOperator kronecker_operator(const GradedMesh& mesh_x, const GradedMesh& mesh_y,
                                     const KernelParams& params) {
    params.validate();
    auto to_vector = [](const std::vector<double>& v) {
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    KroneckerOperator op;
    op.d_alpha = to_vector(diag_entries(mesh_x, params.alpha));
    op.d_beta = to_vector(diag_entries(mesh_y, params.beta));
    op.g_alpha = gram_entries(mesh_x, params.alpha);
    op.g_beta = gram_entries(mesh_y, params.beta);
    return op;
}

SolveResult evolve_2d(const GradedMesh& mesh_x, const GradedMesh& mesh_y,
                      const KernelParams& params, const TimeGrid& grid, const NodalForcing& f,
                      const std::function<double(double, double)>& u0,
                      const Evolve2DOptions& options, const StepObserver& observer) {
    grid.validate();
    const auto start = Clock::now();
    const KroneckerOperator op = kronecker_operator(mesh_x, mesh_y, params);
    const Eigen::Index n = op.size();
    const double tau = grid.tau();

    std::optional<DenseLU> dense_lu;
    Matrix dense_implicit;
    if (options.dense) {
        if (mesh_x.half_count() > kMaxDenseHalfCount || mesh_y.half_count() > kMaxDenseHalfCount)
            throw std::invalid_argument("evolve_2d: dense path limited to N <= 12 per axis");
        dense_implicit = Matrix::Identity(n, n) + 0.5 * tau * kron_dense(op);
        dense_lu.emplace(dense_implicit);
    }

    const LinearOperator implicit_apply = [&op, tau](const Vector& v) -> Vector {
        return v + 0.5 * tau * kron_matvec(op, v);
    };

    KrylovOptions krylov;
    krylov.restart = options.restart;
    if (options.diagonal_scaling) {
        krylov.right_scaling.resize(n);
        const Eigen::Index nb = op.d_beta.size();
        for (Eigen::Index i = 0; i < op.d_alpha.size(); ++i)
            for (Eigen::Index k = 0; k < nb; ++k)
                krylov.right_scaling[i * nb + k] =
                    1.0 / (1.0 + 0.5 * tau *
                                     (op.d_alpha[i] * op.d_beta[k] -
                                      op.g_alpha(i, i) * op.g_beta(k, k)));
    }

    SolveResult result;
    result.values.resize(n);
    const auto xs = mesh_x.interior_nodes();
    const auto ys = mesh_y.interior_nodes();
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t k = 0; k < ys.size(); ++k)
            result.values[static_cast<Eigen::Index>(i * ys.size() + k)] = u0(xs[i], ys[k]);

    Vector load(n);
    for (std::size_t j = 1; j <= grid.steps; ++j) {
        const double t_half = (static_cast<double>(j) - 0.5) * tau;
        f(t_half, std::span<double>(load.data(), static_cast<std::size_t>(n)));
        const Vector rhs = result.values - 0.5 * tau * kron_matvec(op, result.values) + tau * load;
        if (dense_lu) {
            result.values = dense_lu->solve(rhs);
            result.residual =
                std::max(result.residual, relative_residual(dense_implicit, result.values, rhs));
        } else {
            krylov.initial_guess = result.values;
            auto solved = krylov_solve(implicit_apply, rhs, options.tol, options.max_iter, krylov);
            result.values = std::move(solved.x);
            result.residual = std::max(result.residual, solved.relative_residual);
        }
        if (observer)
            observer(j, grid.time(j), result.values);
    }
    result.wall_seconds = seconds_since(start);
    return result;
}

} // namespace nonlocal
