#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "nonlocal/mesh.hpp"

namespace nonlocal {

/// Dense collocation matrix A = D_alpha - G_alpha on the interior nodes.
/// Row/column 0 corresponds to node x_1.
struct StiffnessMatrix {
    GradedMesh mesh;
    double alpha;
    Eigen::MatrixXd entries;

    Eigen::Index size() const noexcept { return entries.rows(); }
};

/// d_i = int_a^b |x_i - y|^(-alpha) dy at the interior nodes.
std::vector<double> diag_entries(const GradedMesh& mesh, double alpha);

/// g_{i,j} = int phi_j(y) |x_i - y|^(-alpha) dy, from the closed-form
/// three-point stencil of |s - x_i|^(2-alpha). Consecutive differences of the
/// stencil are formed with expm1/log1p so they keep full relative precision
/// when the cell is small against its distance to x_i.
Eigen::MatrixXd gram_entries(const GradedMesh& mesh, double alpha);

StiffnessMatrix assemble(const GradedMesh& mesh, double alpha);

/// sum_k a_{i,k} from the two boundary-hat integrals; i is the node index
/// in 1..2N-1.
double row_sum_closed_form(const GradedMesh& mesh, double alpha, std::size_t i);

/// a_{i,i} = d_i - C_alpha (h_i^(1-alpha) + h_{i+1}^(1-alpha)); i in 1..2N-1.
double diagonal_closed_form(const GradedMesh& mesh, double alpha, std::size_t i);

struct MMatrixCertificate {
    bool positive_diagonal = false;
    bool nonpositive_off_diagonal = false;
    double min_row_margin = 0.0; // min_i a_ii - sum_{k != i} |a_ik|

    bool holds() const noexcept {
        return positive_diagonal && nonpositive_off_diagonal && min_row_margin > 0.0;
    }
};

MMatrixCertificate certify_m_matrix(const Eigen::MatrixXd& a);

/// Plain-text dump, one row per line, entries separated by spaces.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& a);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& a);

} // namespace nonlocal
