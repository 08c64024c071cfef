#pragma once

#include "beckmann/grid.hpp"

namespace beckmann {

constexpr double kCompatTolerance = 1e-8;
/// Above this the solver never corrects the mean of the right-hand side.
constexpr double kMeanCorrectionLimit = 1e-4;

/// Neumann-Poisson problem  Lap u = f in the box, grad u . eta = 0 on the walls.
/// The boundary datum is homogeneous in every use, so it is not stored.
struct NeumannProblem {
    ScalarField f;

    explicit NeumannProblem(ScalarField rhs) : f(std::move(rhs)) {}
    const Grid& grid() const { return f.grid(); }
};

struct SolverOptions {
    double cg_tol = 1e-10;    // relative to max|f|, measured in the max-norm
    long max_iter = 0;        // 0 selects 20 * node count
    double compat_tol = kCompatTolerance;
    /// When set, a right-hand side with compat_tol < |int f| < 1e-4 is made
    /// mean-free and the solve proceeds with a warning instead of failing.
    bool correct_small_mean = false;
};

/// Mean-zero solution of the discrete Neumann problem.
struct Potential {
    ScalarField u;
    double residual_inf = 0.0;
    long iterations = 0;
    double mean_correction = 0.0;  // mean removed from f, zero unless corrected
};

bool check_compatibility(const ScalarField& f, double tol);

/// Conjugate gradients on the singular Neumann Laplacian, restricted to the
/// mean-zero subspace by projecting the iterate and residual every step.
/// Throws CompatibilityViolated or NonConvergence.
Potential solve_neumann(const NeumannProblem& problem, const SolverOptions& options = {});

/// max-norm of (discrete Laplacian of u) - f.
double solve_residual(const ScalarField& u, const ScalarField& f);
double solve_residual(const Potential& u, const ScalarField& f);

/// Removes the grid mean of v in place.
void project_mean_zero(std::span<double> v);

}  // namespace beckmann
