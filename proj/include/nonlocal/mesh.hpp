#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nonlocal {

struct Domain1D {
    double a = 0.0;
    double b = 1.0;

    double length() const noexcept { return b - a; }
    double half_length() const noexcept { return 0.5 * (b - a); }
    bool contains(double x) const noexcept { return a <= x && x <= b; }
};

/// Symmetric graded partition a = x_0 < x_1 < ... < x_2N = b, clustered at
/// both endpoints like (j/N)^r. r > 1 refines toward the boundary, 0 < r < 1
/// coarsens there, r = 1 is uniform.
class GradedMesh {
public:
    GradedMesh(const Domain1D& domain, std::size_t half_count, double grading);

    const Domain1D& domain() const noexcept { return domain_; }
    std::size_t half_count() const noexcept { return half_count_; }
    double grading() const noexcept { return grading_; }

    std::size_t intervals() const noexcept { return 2 * half_count_; }
    std::size_t node_count() const noexcept { return 2 * half_count_ + 1; }
    std::size_t interior_count() const noexcept { return 2 * half_count_ - 1; }

    std::span<const double> nodes() const noexcept { return nodes_; }
    double node(std::size_t j) const { return nodes_.at(j); }

    /// h_j = x_j - x_{j-1} for 1 <= j <= 2N.
    double size(std::size_t j) const;
    std::span<const double> sizes() const noexcept { return sizes_; }

    /// Interior nodes x_1 .. x_{2N-1}.
    std::span<const double> interior_nodes() const noexcept {
        return std::span<const double>(nodes_).subspan(1, interior_count());
    }

    /// Index k with x_k <= x <= x_{k+1}; requires x in [a, b].
    std::size_t locate(double x) const;

private:
    Domain1D domain_;
    std::size_t half_count_;
    double grading_;
    std::vector<double> nodes_;
    std::vector<double> sizes_; // sizes_[j-1] = h_j
};

GradedMesh build_graded_mesh(const Domain1D& domain, std::size_t half_count, double grading);

/// Value of the hat function phi_j at x.
double hat_eval(const GradedMesh& mesh, std::size_t j, double x);

/// Piecewise linear interpolant sum_k values[k] * phi_k(x).
double interp(const GradedMesh& mesh, std::span<const double> nodal_values, double x);

} // namespace nonlocal
