#include "nonlocal/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace nonlocal {

double jacobi_weight_mass(double a_exp, double b_exp) {
    if (!(a_exp > -1.0) || !(b_exp > -1.0))
        throw std::invalid_argument("jacobi_weight_mass: exponents must exceed -1");
    return std::exp((a_exp + b_exp + 1.0) * std::numbers::ln2 + std::lgamma(a_exp + 1.0) +
                    std::lgamma(b_exp + 1.0) - std::lgamma(a_exp + b_exp + 2.0));
}

namespace {

struct JacobiValue {
    double p;  // P_n^{(a,b)}(x)
    double dp; // derivative
};

JacobiValue jacobi_eval(std::size_t n, double a, double b, double x) {
    const double ab = a + b;
    double p0 = 1.0;
    double p1 = 0.5 * (a - b + (ab + 2.0) * x);
    for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + ab;
        const double c1 = 2.0 * kk * (kk + ab) * (s - 2.0);
        const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        const double c3 = 2.0 * (kk + a - 1.0) * (kk + b - 1.0) * s;
        const double p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    const double nn = static_cast<double>(n);
    const double s = 2.0 * nn + ab;
    const double dp = (nn * (a - b - s * x) * p1 + 2.0 * (nn + a) * (nn + b) * p0) /
                      (s * (1.0 - x) * (1.0 + x));
    return {p1, dp};
}

} // namespace

JacobiRule gauss_jacobi_rule(std::size_t n, double a_exp, double b_exp) {
    if (n < 1)
        throw std::invalid_argument("gauss_jacobi_rule: need at least one node");
    if (!(a_exp > -1.0) || !(b_exp > -1.0) || !std::isfinite(a_exp) || !std::isfinite(b_exp))
        throw std::invalid_argument("gauss_jacobi_rule: exponents must be finite and exceed -1");

    const double a = a_exp;
    const double b = b_exp;
    const double ab = a + b;

    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));

    diag[0] = (b - a) / (ab + 2.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + ab;
        diag[static_cast<Eigen::Index>(k)] = (b * b - a * a) / (s * (s + 2.0));
    }
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + ab;
        double v;
        if (k == 1) {
            // (k + a + b) cancels against (2k + a + b - 1); keeps a + b = -1 finite
            v = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            v = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
        }
        sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(v);
    }

    JacobiRule rule;
    rule.n = n;
    rule.a_exp = a_exp;
    rule.b_exp = b_exp;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const double mass = jacobi_weight_mass(a, b);
    if (n == 1) {
        rule.nodes[0] = diag[0];
        rule.weights[0] = mass;
        return rule;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("gauss_jacobi_rule: tridiagonal eigensolver failed");
    // Eigenvalues are only good to about n eps; polish each node by Newton on
    // P_n and take the weights from P_n', rescaled to the exact mass.
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double x = eig.eigenvalues()[static_cast<Eigen::Index>(k)];
        JacobiValue pv = jacobi_eval(n, a, b, x);
        for (int it = 0; it < 3; ++it) {
            const double dx = pv.p / pv.dp;
            const double next = std::clamp(x - dx, std::nextafter(-1.0, 0.0), std::nextafter(1.0, 0.0));
            if (!std::isfinite(next))
                break;
            x = next;
            pv = jacobi_eval(n, a, b, x);
            if (std::abs(dx) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
                break;
        }
        rule.nodes[k] = x;
        rule.weights[k] = 1.0 / ((1.0 - x) * (1.0 + x) * pv.dp * pv.dp);
        total += rule.weights[k];
    }
    for (double& w : rule.weights)
        w *= mass / total;
    return rule;
}

namespace {

std::shared_ptr<const JacobiRule> cached_rule(std::size_t n, double a_exp, double b_exp) {
    static std::mutex mutex;
    static std::map<std::tuple<std::size_t, double, double>, std::shared_ptr<const JacobiRule>>
        cache;
    const auto key = std::make_tuple(n, a_exp, b_exp);
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    auto rule = std::make_shared<const JacobiRule>(gauss_jacobi_rule(n, a_exp, b_exp));
    cache.emplace(key, rule);
    return rule;
}

struct SingularPoint {
    double location;
    double exponent; // factor |y - location|^exponent
};

// Integrates residual(y) * prod_k |y - point_k|^exp_k over [p, q]. The
// points tagged p_id / q_id sit on the piece ends and go into the Jacobi
// weight; the rest are evaluated at the nodes.
class PieceIntegrator {
public:
    PieceIntegrator(const ScalarFunction& residual, std::array<SingularPoint, 3> points,
                    std::size_t n)
        : residual_(residual), points_(points), n_(n) {}

    double integrate(double p, double q, int p_id, int q_id, int depth = 0) const {
        const double length = q - p;
        if (!(length > 0.0))
            return 0.0;
        double clearance = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            if (k == p_id || k == q_id || points_[k].exponent == 0.0)
                continue;
            const double s = points_[k].location;
            const double dist = s < p ? p - s : (s > q ? s - q : 0.0);
            clearance = std::min(clearance, dist);
        }
        if (length <= clearance || depth >= kMaxDepth)
            return apply_rule(p, q, p_id, q_id);
        const double mid = p + 0.5 * length;
        return integrate(p, mid, p_id, -1, depth + 1) + integrate(mid, q, -1, q_id, depth + 1);
    }

private:
    static constexpr int kMaxDepth = 200;

    double apply_rule(double p, double q, int p_id, int q_id) const {
        const double a_exp = q_id >= 0 ? points_[q_id].exponent : 0.0; // (1 - t) end is q
        const double b_exp = p_id >= 0 ? points_[p_id].exponent : 0.0; // (1 + t) end is p
        const auto rule = cached_rule(n_, a_exp, b_exp);
        const double half = 0.5 * (q - p);
        const double centre = p + half;
        double sum = 0.0;
        for (std::size_t k = 0; k < rule->n; ++k) {
            const double y = centre + half * rule->nodes[k];
            double value = residual_(y);
            for (int m = 0; m < 3; ++m) {
                if (m == p_id || m == q_id || points_[m].exponent == 0.0)
                    continue;
                value *= std::pow(std::abs(y - points_[m].location), points_[m].exponent);
            }
            sum += rule->weights[k] * value;
        }
        return std::pow(half, 1.0 + a_exp + b_exp) * sum;
    }

    const ScalarFunction& residual_;
    std::array<SingularPoint, 3> points_;
    std::size_t n_;
};

void check_alpha(double alpha, const char* where) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument(std::string(where) + ": alpha must lie in (0, 1)");
}

} // namespace

void KernelParams::validate() const {
    check_alpha(alpha, "KernelParams");
    check_alpha(beta, "KernelParams (beta)");
}

double kernel_mass(const Domain1D& domain, double alpha, double x) {
    check_alpha(alpha, "kernel_mass");
    return (std::pow(x - domain.a, 1.0 - alpha) + std::pow(domain.b - x, 1.0 - alpha)) /
           (1.0 - alpha);
}

double singular_convolution(const ScalarFunction& u, double x, const Domain1D& domain,
                            double alpha, double boundary_exp, std::size_t n) {
    check_alpha(alpha, "singular_convolution");
    if (!(x > domain.a && x < domain.b))
        throw std::domain_error("singular_convolution: x must lie strictly inside (a, b)");
    if (!(boundary_exp > -1.0) || !std::isfinite(boundary_exp))
        throw std::invalid_argument("singular_convolution: boundary exponent must exceed -1");
    if (n < 1)
        throw std::invalid_argument("singular_convolution: need at least one node");

    const double a = domain.a;
    const double b = domain.b;
    const ScalarFunction residual =
        boundary_exp == 0.0
            ? u
            : ScalarFunction([&u, a, b, boundary_exp](double y) {
                  return u(y) / std::pow((y - a) * (b - y), boundary_exp);
              });

    const std::array<SingularPoint, 3> points{
        SingularPoint{a, boundary_exp}, SingularPoint{x, -alpha}, SingularPoint{b, boundary_exp}};
    const PieceIntegrator integrator(residual, points, n);
    return integrator.integrate(a, x, 0, 1) + integrator.integrate(x, b, 1, 2);
}

double apply_nonlocal(const ScalarFunction& u, double x, const Domain1D& domain, double alpha,
                      double boundary_exp, std::size_t n) {
    const double conv = singular_convolution(u, x, domain, alpha, boundary_exp, n);
    return conv - u(x) * kernel_mass(domain, alpha, x);
}

ManufacturedSolution::ManufacturedSolution(SolutionKind kind, double sigma,
                                           const Domain1D& domain, TimeProfile profile)
    : kind_(kind), sigma_(sigma), domain_(domain), profile_(profile) {
    if (!(domain.a < domain.b))
        throw std::invalid_argument("ManufacturedSolution: degenerate domain");
}

ManufacturedSolution ManufacturedSolution::smooth(const Domain1D& domain, TimeProfile profile) {
    return ManufacturedSolution(SolutionKind::smooth, 0.0, domain, profile);
}

ManufacturedSolution ManufacturedSolution::singular(double sigma, const Domain1D& domain,
                                                    TimeProfile profile) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw std::invalid_argument("ManufacturedSolution: sigma must lie in (0, 1)");
    return ManufacturedSolution(SolutionKind::singular, sigma, domain, profile);
}

ManufacturedSolution ManufacturedSolution::scaled(double factor) const {
    ManufacturedSolution copy = *this;
    copy.amplitude_ *= factor;
    return copy;
}

double ManufacturedSolution::boundary_exp() const noexcept {
    return kind_ == SolutionKind::singular ? sigma_ : 0.0;
}

double ManufacturedSolution::spatial(double x) const {
    if (!(x >= domain_.a && x <= domain_.b))
        return 0.0;
    switch (kind_) {
    case SolutionKind::smooth:
        return amplitude_ * std::exp(x) *
               std::sin(std::numbers::pi * (x - domain_.a) / domain_.length());
    case SolutionKind::singular:
        return amplitude_ * std::exp(x) * std::pow((x - domain_.a) * (domain_.b - x), sigma_);
    }
    return 0.0;
}

double ManufacturedSolution::value(double x, double t) const {
    const double v = spatial(x);
    return profile_ == TimeProfile::exponential ? std::exp(t) * v : v;
}

double ManufacturedSolution::time_derivative(double x, double t) const {
    return profile_ == TimeProfile::exponential ? std::exp(t) * spatial(x) : 0.0;
}

ScalarFunction ManufacturedSolution::spatial_function() const {
    return [self = *this](double x) { return self.spatial(x); };
}

double forcing_steady(const ManufacturedSolution& ms, const KernelParams& params, double x,
                      std::size_t n) {
    if (ms.amplitude() == 0.0)
        return 0.0;
    return -apply_nonlocal(ms.spatial_function(), x, ms.domain(), params.alpha,
                           ms.boundary_exp(), n);
}

double forcing_evolution(const ManufacturedSolution& ms, const KernelParams& params, double x,
                         double t, std::size_t n) {
    const double minus_lv = forcing_steady(ms, params, x, n);
    const double scale = ms.profile() == TimeProfile::exponential ? std::exp(t) : 1.0;
    return ms.time_derivative(x, t) + scale * minus_lv;
}

namespace {

double time_factor(TimeProfile profile, double t) {
    return profile == TimeProfile::exponential ? std::exp(t) : 1.0;
}

} // namespace

SeparableForcing2D::SeparableForcing2D(const ManufacturedSolution& along_x,
                                       const ManufacturedSolution& along_y,
                                       const KernelParams& params,
                                       std::span<const double> x_nodes,
                                       std::span<const double> y_nodes, std::size_t n)
    : profile_(along_x.profile()) {
    params.validate();
    auto tabulate = [n](const ManufacturedSolution& ms, double exponent,
                        std::span<const double> nodes, std::vector<double>& v,
                        std::vector<double>& c, std::vector<double>& d) {
        const auto u = ms.spatial_function();
        for (double x : nodes) {
            v.push_back(ms.spatial(x));
            c.push_back(ms.amplitude() == 0.0
                            ? 0.0
                            : singular_convolution(u, x, ms.domain(), exponent,
                                                   ms.boundary_exp(), n));
            d.push_back(kernel_mass(ms.domain(), exponent, x));
        }
    };
    tabulate(along_x, params.alpha, x_nodes, vx_, cx_, dx_);
    tabulate(along_y, params.beta, y_nodes, vy_, cy_, dy_);
}

double SeparableForcing2D::operator()(std::size_t i, std::size_t k, double t) const {
    const double vw = vx_[i] * vy_[k];
    const double minus_l = vw * dx_[i] * dy_[k] - cx_[i] * cy_[k];
    const double scale = time_factor(profile_, t);
    const double u_t = profile_ == TimeProfile::exponential ? scale * vw : 0.0;
    return u_t + scale * minus_l;
}

void SeparableForcing2D::fill(double t, std::span<double> out) const {
    if (out.size() != rows() * cols())
        throw std::invalid_argument("SeparableForcing2D::fill: output size mismatch");
    for (std::size_t i = 0; i < rows(); ++i)
        for (std::size_t k = 0; k < cols(); ++k)
            out[i * cols() + k] = (*this)(i, k, t);
}

double SeparableForcing2D::exact(std::size_t i, std::size_t k, double t) const {
    return time_factor(profile_, t) * vx_[i] * vy_[k];
}

} // namespace nonlocal
