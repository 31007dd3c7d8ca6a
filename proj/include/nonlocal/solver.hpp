#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "nonlocal/assembly.hpp"
#include "nonlocal/linalg.hpp"
#include "nonlocal/mesh.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

/// Uniform time levels t_j = j tau, tau = final_time / steps.
struct TimeGrid {
    std::size_t steps = 1;
    double final_time = 1.0;

    double tau() const noexcept { return final_time / static_cast<double>(steps); }
    double time(std::size_t j) const noexcept { return static_cast<double>(j) * tau(); }
    void validate() const;
};

/// Interior nodal values (boundary nodes are zero by construction).
struct SolveResult {
    Vector values;
    double residual = 0.0; // worst relative residual over all linear solves
    double wall_seconds = 0.0;
};

/// Fills the forcing at every unknown for time t.
using NodalForcing = std::function<void(double t, std::span<double> out)>;
/// Called after each time step with the new level.
using StepObserver = std::function<void(std::size_t step, double t, const Vector& values)>;

SolveResult solve_steady(const StiffnessMatrix& a, const Vector& forcing);
SolveResult solve_steady(const GradedMesh& mesh, double alpha, const ScalarFunction& f);

/// Crank-Nicolson:
///   (I + tau/2 A) U^j = (I - tau/2 A) U^{j-1} + tau F^{j-1/2}
/// with one LU factorization shared by all steps.
SolveResult evolve_1d(const GradedMesh& mesh, double alpha, const TimeGrid& grid,
                      const NodalForcing& f, const ScalarFunction& u0,
                      const StepObserver& observer = {});
SolveResult evolve_1d(const GradedMesh& mesh, double alpha, const TimeGrid& grid,
                      const std::function<double(double x, double t)>& f,
                      const ScalarFunction& u0, const StepObserver& observer = {});

struct Evolve2DOptions {
    double tol = 1e-10;
    int max_iter = 5000;
    int restart = 50;
    bool diagonal_scaling = false;
    /// Factor the explicit Kronecker matrix instead of iterating; only for
    /// N <= kMaxDenseHalfCount per axis.
    bool dense = false;
};

inline constexpr std::size_t kMaxDenseHalfCount = 12;

/// Builds D_alpha (x) D_beta - G_alpha (x) G_beta for the tensor mesh.
KroneckerOperator kronecker_operator(const GradedMesh& mesh_x, const GradedMesh& mesh_y,
                                     const KernelParams& params);

/// Crank-Nicolson for the tensor-product kernel; unknowns are laid out with
/// the x index outer. Each step is solved matrix-free with GMRES.
SolveResult evolve_2d(const GradedMesh& mesh_x, const GradedMesh& mesh_y,
                      const KernelParams& params, const TimeGrid& grid, const NodalForcing& f,
                      const std::function<double(double x, double y)>& u0,
                      const Evolve2DOptions& options = {}, const StepObserver& observer = {});

} // namespace nonlocal
