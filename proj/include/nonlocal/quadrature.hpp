#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nonlocal/mesh.hpp"

namespace nonlocal {

using ScalarFunction = std::function<double(double)>;

inline constexpr std::size_t kDefaultQuadNodes = 64;

/// Gauss-Jacobi rule on (-1, 1) for the weight (1 - t)^a_exp (1 + t)^b_exp.
struct JacobiRule {
    std::size_t n = 0;
    double a_exp = 0.0;
    double b_exp = 0.0;
    std::vector<double> nodes;   // ascending, strictly inside (-1, 1)
    std::vector<double> weights; // all positive
};

/// Integral of (1 - t)^a (1 + t)^b over (-1, 1): 2^(a+b+1) B(a+1, b+1).
double jacobi_weight_mass(double a_exp, double b_exp);

/// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix of
/// the three-term recurrence, weights the squared first eigenvector
/// components scaled by the weight mass.
JacobiRule gauss_jacobi_rule(std::size_t n, double a_exp, double b_exp);

struct KernelParams {
    double alpha = 0.5;
    double beta = 0.5; // second axis kernel exponent, 2D only

    void validate() const;
};

/// int_a^b |x - y|^(-alpha) dy in closed form.
double kernel_mass(const Domain1D& domain, double alpha, double x);

/// int_a^b u(y) |x - y|^(-alpha) dy for x strictly inside (a, b).
///
/// u may carry endpoint factors (y - a)^boundary_exp (b - y)^boundary_exp
/// and is otherwise smooth. The interval is split at y = x; each side is
/// integrated with Gauss-Jacobi rules whose weights absorb the kernel
/// singularity and the boundary factor at the piece's own endpoints. Pieces
/// that lie closer to a foreign singular point than their own length are
/// bisected first, so nearly singular factors never sit on a single rule.
double singular_convolution(const ScalarFunction& u, double x, const Domain1D& domain,
                            double alpha, double boundary_exp,
                            std::size_t n = kDefaultQuadNodes);

/// L u(x) = int_a^b (u(y) - u(x)) |x - y|^(-alpha) dy.
double apply_nonlocal(const ScalarFunction& u, double x, const Domain1D& domain,
                      double alpha, double boundary_exp,
                      std::size_t n = kDefaultQuadNodes);

enum class SolutionKind { smooth, singular };
enum class TimeProfile { steady, exponential };

/// Exact solutions used to synthesize forcing terms.
///   smooth:   v(x) = e^x sin(pi (x - a)/(b - a))
///   singular: v(x) = e^x (x - a)^sigma (b - x)^sigma
/// With TimeProfile::exponential the solution is u(x, t) = e^t v(x).
class ManufacturedSolution {
public:
    static ManufacturedSolution smooth(const Domain1D& domain = {},
                                       TimeProfile profile = TimeProfile::steady);
    static ManufacturedSolution singular(double sigma, const Domain1D& domain = {},
                                         TimeProfile profile = TimeProfile::steady);

    SolutionKind kind() const noexcept { return kind_; }
    double sigma() const noexcept { return sigma_; }
    TimeProfile profile() const noexcept { return profile_; }
    const Domain1D& domain() const noexcept { return domain_; }
    double amplitude() const noexcept { return amplitude_; }

    /// Copy with u scaled by `factor` (0 gives the zero solution).
    ManufacturedSolution scaled(double factor) const;

    /// Exponent of the endpoint factors carried by u: 0 or sigma.
    double boundary_exp() const noexcept;

    /// Spatial profile v(x), zero outside [a, b].
    double spatial(double x) const;
    double value(double x, double t = 0.0) const;
    double time_derivative(double x, double t) const;

    ScalarFunction spatial_function() const;

private:
    ManufacturedSolution(SolutionKind kind, double sigma, const Domain1D& domain,
                         TimeProfile profile);

    SolutionKind kind_;
    double sigma_;
    Domain1D domain_;
    TimeProfile profile_;
    double amplitude_ = 1.0;
};

/// f = -L u for the steady problem.
double forcing_steady(const ManufacturedSolution& ms, const KernelParams& params, double x,
                      std::size_t n = kDefaultQuadNodes);

/// f = u_t - L u(., t) at (x, t).
double forcing_evolution(const ManufacturedSolution& ms, const KernelParams& params, double x,
                         double t, std::size_t n = kDefaultQuadNodes);

/// Forcing for the tensor-product problem with kernel
/// |x - x'|^(-alpha) |y - y'|^(-beta) and exact solution
/// u(x, y, t) = T(t) v(x) w(y), tabulated on a node grid:
///   f = T'(t) v w - T(t) [ C_alpha v(x) C_beta w(y) - v(x) w(y) d_alpha(x) d_beta(y) ]
/// where C is the singular convolution and d the kernel mass.
class SeparableForcing2D {
public:
    SeparableForcing2D(const ManufacturedSolution& along_x, const ManufacturedSolution& along_y,
                       const KernelParams& params, std::span<const double> x_nodes,
                       std::span<const double> y_nodes, std::size_t n = kDefaultQuadNodes);

    std::size_t rows() const noexcept { return vx_.size(); }
    std::size_t cols() const noexcept { return vy_.size(); }

    double operator()(std::size_t i, std::size_t k, double t) const;
    /// Row-major (x index outer) grid at time t.
    void fill(double t, std::span<double> out) const;

    /// Exact solution on the same grid.
    double exact(std::size_t i, std::size_t k, double t) const;

private:
    TimeProfile profile_;
    std::vector<double> vx_, vy_, cx_, cy_, dx_, dy_;
};

} // namespace nonlocal
