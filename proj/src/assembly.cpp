#include "nonlocal/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nonlocal/quadrature.hpp"

namespace nonlocal {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("assembly: alpha must lie in (0, 1)");
}

void check_interior_index(const GradedMesh& mesh, std::size_t i) {
    if (i < 1 || i > mesh.interior_count())
        throw std::out_of_range("assembly: node index " + std::to_string(i) +
                                " outside 1..2N-1");
}

// (d + h)^p - d^p for d >= 0, h > 0.
double power_increment(double d, double h, double p) {
    if (d == 0.0)
        return std::pow(h, p);
    return std::pow(d, p) * std::expm1(p * std::log1p(h / d));
}

// 1 - (1 - (1 - delta)^p) / (p delta) for delta in (0, 1]; the leading terms
// cancel for small delta, so the binomial series is summed instead.
double boundary_hat_factor(double delta, double p) {
    if (delta >= 0.5)
        return 1.0 - (1.0 - std::pow(1.0 - delta, p)) / (p * delta);
    double term = 0.5 * (p - 1.0) * delta;
    double sum = term;
    for (int k = 2; k < 400; ++k) {
        term *= (static_cast<double>(k) - p) / static_cast<double>(k + 1) * delta;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum))
            break;
    }
    return sum;
}

// int phi_boundary(y) |x - y|^(-alpha) dy over the boundary cell of size h
// at distance `dist` from x (measured to the outer endpoint).
double boundary_hat_integral(double dist, double h, double alpha) {
    const double p = 2.0 - alpha;
    return std::pow(dist, 1.0 - alpha) / (1.0 - alpha) * boundary_hat_factor(h / dist, p);
}

} // namespace

std::vector<double> diag_entries(const GradedMesh& mesh, double alpha) {
    check_alpha(alpha);
    std::vector<double> d;
    d.reserve(mesh.interior_count());
    for (double x : mesh.interior_nodes())
        d.push_back(kernel_mass(mesh.domain(), alpha, x));
    return d;
}

Eigen::MatrixXd gram_entries(const GradedMesh& mesh, double alpha) {
    check_alpha(alpha);
    const auto x = mesh.nodes();
    const auto h = mesh.sizes(); // h[k] = x_{k+1} - x_k
    const std::size_t cells = mesh.intervals();
    const std::size_t m = mesh.interior_count();
    const double p = 2.0 - alpha;
    const double c_alpha = 1.0 / ((1.0 - alpha) * (2.0 - alpha));

    Eigen::MatrixXd g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    std::vector<double> delta(cells); // Q_{k+1} - Q_k, Q_k = |x_k - x_i|^p
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t k = 0; k < cells; ++k) {
            if (k >= i) // cell right of x_i
                delta[k] = power_increment(x[k] - x[i], h[k], p);
            else        // cell left of x_i
                delta[k] = -power_increment(x[i] - x[k + 1], h[k], p);
        }
        for (std::size_t j = 1; j <= m; ++j) {
            g(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) =
                c_alpha * (delta[j] / h[j] - delta[j - 1] / h[j - 1]);
        }
    }
    return g;
}

StiffnessMatrix assemble(const GradedMesh& mesh, double alpha) {
    Eigen::MatrixXd a = -gram_entries(mesh, alpha);
    const auto d = diag_entries(mesh, alpha);
    for (std::size_t i = 0; i < d.size(); ++i)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += d[i];
    return StiffnessMatrix{mesh, alpha, std::move(a)};
}

double row_sum_closed_form(const GradedMesh& mesh, double alpha, std::size_t i) {
    check_alpha(alpha);
    check_interior_index(mesh, i);
    const auto x = mesh.nodes();
    const std::size_t last = mesh.intervals();
    return boundary_hat_integral(x[i] - x[0], mesh.size(1), alpha) +
           boundary_hat_integral(x[last] - x[i], mesh.size(last), alpha);
}

double diagonal_closed_form(const GradedMesh& mesh, double alpha, std::size_t i) {
    check_alpha(alpha);
    check_interior_index(mesh, i);
    const double c_alpha = 1.0 / ((1.0 - alpha) * (2.0 - alpha));
    return kernel_mass(mesh.domain(), alpha, mesh.node(i)) -
           c_alpha * (std::pow(mesh.size(i), 1.0 - alpha) + std::pow(mesh.size(i + 1), 1.0 - alpha));
}

MMatrixCertificate certify_m_matrix(const Eigen::MatrixXd& a) {
    MMatrixCertificate cert;
    cert.positive_diagonal = true;
    cert.nonpositive_off_diagonal = true;
    cert.min_row_margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double off = 0.0;
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            if (k == i)
                continue;
            if (a(i, k) > 0.0)
                cert.nonpositive_off_diagonal = false;
            off += std::abs(a(i, k));
        }
        if (!(a(i, i) > 0.0))
            cert.positive_diagonal = false;
        cert.min_row_margin = std::min(cert.min_row_margin, a(i, i) - off);
    }
    return cert;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& a) {
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            if (k > 0)
                out << ' ';
            out << a(i, k);
        }
        out << '\n';
    }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& a) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_matrix: cannot open " + path.string());
    write_matrix(out, a);
}

} // namespace nonlocal
