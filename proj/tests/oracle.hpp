#pragma once

// Test-only reference quadrature, deliberately independent of the library's
// Gauss-Jacobi path: composite Gauss-Legendre after a sigmoidal change of
// variables that flattens endpoint singularities.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

struct LegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline LegendreRule legendre(int m) {
    LegendreRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

// g(y, y - lo, hi - y); the two distances are exact even where y rounds to an end.
using Integrand = std::function<double(double y, double d_lo, double d_hi)>;

inline double sigmoidal_sum(const Integrand& g, double lo, double hi, int panels,
                            const LegendreRule& rule, double q) {
    const double len = hi - lo;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double s0 = static_cast<double>(p) / panels;
        const double hs = 1.0 / panels;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double s = s0 + 0.5 * hs * (rule.nodes[k] + 1.0);
            const double a = std::pow(s, q);
            const double b = std::pow(1.0 - s, q);
            const double den = a + b;
            const double d_lo = len * a / den;
            const double d_hi = len * b / den;
            // d phi / ds for phi = s^q / (s^q + (1-s)^q)
            const double dphi = q * std::pow(s * (1.0 - s), q - 1.0) / (den * den);
            if (dphi == 0.0)
                continue;
            sum += 0.5 * hs * rule.weights[k] * len * dphi * g(lo + d_lo, d_lo, d_hi);
        }
    }
    return sum;
}

// Doubles the panel count until successive sums agree to `tol` (relative to max(1,|I|)).
inline double integrate(const Integrand& g, double lo, double hi, double tol = 1e-11) {
    if (!(hi > lo))
        return 0.0;
    static const LegendreRule rule = legendre(20);
    constexpr double q = 16.0;
    double prev = sigmoidal_sum(g, lo, hi, 2, rule, q);
    for (int panels = 4; panels <= 8192; panels *= 2) {
        const double next = sigmoidal_sum(g, lo, hi, panels, rule, q);
        if (std::abs(next - prev) < tol * std::max(1.0, std::abs(next)))
            return next;
        prev = next;
    }
    throw std::runtime_error("oracle::integrate did not converge");
}

// int_a^b (u(y) - u(x)) |x - y|^(-alpha) dy with u given through its
// distances to a and b: u(y, y - a, b - y).
inline double nonlocal(const Integrand& u, double x, double a, double b, double alpha) {
    const double ux = u(x, x - a, b - x);
    const Integrand left = [&](double y, double d_lo, double d_hi) {
        return (u(y, d_lo, (x - a) - d_lo + (b - x)) - ux) * std::pow(d_hi, -alpha);
    };
    const Integrand right = [&](double y, double d_lo, double d_hi) {
        return (u(y, (x - a) + d_lo, d_hi) - ux) * std::pow(d_lo, -alpha);
    };
    return integrate(left, a, x) + integrate(right, x, b);
}

// int phi_j(y) |x - y|^(-alpha) dy over the hat support [xl, xr] peaked at xc.
inline double hat_kernel(double xl, double xc, double xr, double x, double alpha) {
    std::vector<double> cuts{xl, xc, xr};
    if (x > xl && x < xr && x != xc)
        cuts.insert(x < xc ? cuts.begin() + 1 : cuts.begin() + 2, x);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double lo = cuts[p];
        const double hi = cuts[p + 1];
        const Integrand g = [&](double, double d_lo, double d_hi) {
            // distances measured from the piece ends keep the kernel exact near x
            const double y_from_xl = (lo - xl) + d_lo;
            const double y_to_xr = (xr - hi) + d_hi;
            const double hat = lo < xc ? y_from_xl / (xc - xl) : y_to_xr / (xr - xc);
            double dist;
            if (x <= lo)
                dist = (lo - x) + d_lo;
            else
                dist = (x - hi) + d_hi;
            return hat * std::pow(dist, -alpha);
        };
        total += integrate(g, lo, hi);
    }
    return total;
}

} // namespace oracle
