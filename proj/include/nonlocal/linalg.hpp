#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

namespace nonlocal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class singular_matrix_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative method stopped before reaching its tolerance.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

/// LU factorization with partial pivoting, reusable across right-hand sides.
/// Throws singular_matrix_error when a pivot is negligible against ||A||.
class DenseLU {
public:
    explicit DenseLU(const Matrix& a);

    Vector solve(const Vector& b) const;
    Matrix inverse() const;
    Eigen::Index size() const noexcept { return lu_.rows(); }

private:
    Eigen::PartialPivLU<Matrix> lu_;
};

Vector lu_solve(const Matrix& a, const Vector& b);

/// A = D_alpha (x) D_beta - G_alpha (x) G_beta acting on vectors laid out
/// with the first (alpha) index outer: v[i * n_beta + k].
struct KroneckerOperator {
    Vector d_alpha;
    Vector d_beta;
    Matrix g_alpha;
    Matrix g_beta;

    Eigen::Index size() const noexcept { return d_alpha.size() * d_beta.size(); }
    void validate() const;
};

/// Applies the operator through P V Q^T on the reshaped vector, O(n^3).
Vector kron_matvec(const KroneckerOperator& op, const Vector& v);

/// Explicit (n_alpha n_beta)^2 matrix; only meant for small cross-checks.
Matrix kron_dense(const KroneckerOperator& op);

using LinearOperator = std::function<Vector(const Vector&)>;

struct KrylovOptions {
    int restart = 50;
    Vector initial_guess;    // empty means zero
    Vector right_scaling;    // empty means none; x = diag(scaling) y
};

struct KrylovResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Restarted GMRES. Returns once ||apply(x) - b||_2 <= tol ||b||_2 (true
/// residual); throws convergence_error after max_iter Arnoldi steps.
KrylovResult krylov_solve(const LinearOperator& apply, const Vector& b, double tol,
                          int max_iter, const KrylovOptions& options = {});

struct SpectrumProbe {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    Vector v_min;
    Vector v_max;
    double residual_min = 0.0; // ||H v - lambda v|| / ||v||
    double residual_max = 0.0;
    int iterations = 0;
};

/// Extreme eigenvalues of a symmetric matrix by Lanczos with full
/// reorthogonalization; Ritz pairs are accepted once the explicit residual
/// drops below `residual_tol`, and the eigenvalues reported are the
/// Rayleigh quotients of the Ritz vectors.
SpectrumProbe extreme_eigs_symmetric(const Matrix& h, double residual_tol = 1e-9);

/// ||A||_inf ||A^{-1}||_inf with the inverse taken from the LU factors.
double condition_inf(const Matrix& a);

double norm_inf(const Matrix& a);

} // namespace nonlocal
