#include "nonlocal/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nonlocal {

GradedMesh::GradedMesh(const Domain1D& domain, std::size_t half_count, double grading)
    : domain_(domain), half_count_(half_count), grading_(grading) {
    if (!(domain.a < domain.b) || !std::isfinite(domain.a) || !std::isfinite(domain.b))
        throw std::invalid_argument("GradedMesh: degenerate domain, need a < b");
    if (half_count < 1)
        throw std::invalid_argument("GradedMesh: N must be at least 1");
    if (!(grading > 0.0) || !std::isfinite(grading))
        throw std::invalid_argument("GradedMesh: grading exponent r must be positive");

    const double n = static_cast<double>(half_count);
    const double half = domain.half_length();
    nodes_.resize(node_count());
    // Closed form on both halves, never accumulated sizes; 2 - j/N is formed
    // as the integer ratio (2N - j)/N so that x_j + x_{2N-j} = a + b.
    for (std::size_t j = 0; j <= half_count; ++j)
        nodes_[j] = domain.a + half * std::pow(static_cast<double>(j) / n, grading_);
    for (std::size_t j = half_count + 1; j <= 2 * half_count; ++j)
        nodes_[j] = domain.b - half * std::pow(static_cast<double>(2 * half_count - j) / n, grading_);
    nodes_.front() = domain.a;
    nodes_.back() = domain.b;

    sizes_.resize(intervals());
    for (std::size_t j = 1; j <= intervals(); ++j)
        sizes_[j - 1] = nodes_[j] - nodes_[j - 1];
}

double GradedMesh::size(std::size_t j) const {
    if (j < 1 || j > intervals())
        throw std::out_of_range("GradedMesh::size: index " + std::to_string(j) + " outside 1..2N");
    return sizes_[j - 1];
}

std::size_t GradedMesh::locate(double x) const {
    if (!domain_.contains(x))
        throw std::out_of_range("GradedMesh::locate: point outside [a, b]");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
    if (k == 0)
        return 0;
    return std::min(k - 1, intervals() - 1);
}

GradedMesh build_graded_mesh(const Domain1D& domain, std::size_t half_count, double grading) {
    return GradedMesh(domain, half_count, grading);
}

double hat_eval(const GradedMesh& mesh, std::size_t j, double x) {
    if (j >= mesh.node_count())
        throw std::out_of_range("hat_eval: node index outside 0..2N");
    if (!mesh.domain().contains(x))
        throw std::out_of_range("hat_eval: point outside [a, b]");
    const auto xs = mesh.nodes();
    if (x == xs[j])
        return 1.0;
    if (j > 0 && x > xs[j - 1] && x < xs[j])
        return (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    if (j + 1 < xs.size() && x > xs[j] && x < xs[j + 1])
        return (xs[j + 1] - x) / (xs[j + 1] - xs[j]);
    return 0.0;
}

double interp(const GradedMesh& mesh, std::span<const double> nodal_values, double x) {
    if (nodal_values.size() != mesh.node_count())
        throw std::invalid_argument("interp: expected 2N+1 nodal values");
    if (!mesh.domain().contains(x))
        throw std::out_of_range("interp: point outside [a, b]");
    const std::size_t k = mesh.locate(x);
    const auto xs = mesh.nodes();
    const double t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    return (1.0 - t) * nodal_values[k] + t * nodal_values[k + 1];
}

} // namespace nonlocal
