#pragma once

#include <cstdint>
#include <vector>

#include "beckmann/grid.hpp"
#include "beckmann/poisson.hpp"

namespace beckmann {

/// Beckmann flux w = grad u together with its a-posteriori diagnostics.
struct FluxField {
    VectorField w;
    double div_residual_inf = 0.0;   // max |div w - f|
    double boundary_flux_inf = 0.0;  // max |w . eta| on the walls
    double objective = 0.0;          // J(w) = 1/2 int |w|^2
};

FluxField flux_from_potential(const Potential& u, const ScalarField& f);

/// J(v) = 1/2 int |v|^2 dx.
double beckmann_objective(const VectorField& v);

/// int v1 . v2 dx.
double inner_product(const VectorField& v1, const VectorField& v2);

/// Discrete rotated gradient (-d psi/dy, d psi/dx); divergence-free for the
/// grid stencils because the axis derivatives commute. d = 2 only.
VectorField curl(const ScalarField& psi);

struct PerturbationTrial {
    double objective_base = 0.0;       // J(w)
    double objective_perturb = 0.0;    // J(v)
    double objective_combined = 0.0;   // J(w + v)
    double cross_term = 0.0;           // int w . v
    double margin = 0.0;               // J(w + v) - J(w)
    double div_residual_inf = 0.0;     // max |div(w + v) - f|
    double perturb_divergence_inf = 0.0;  // max |div v|
};

struct OptimalityReport {
    std::vector<PerturbationTrial> trials;
    double min_margin = 0.0;
    double max_abs_cross = 0.0;
};

/// Compares w against w + curl(psi) for a given stream function.
PerturbationTrial perturbation_trial(const FluxField& base, const ScalarField& f, const ScalarField& psi);

/// Smooth random stream function whose support stays a fixed distance
/// away from the walls, so curl(psi) has zero normal trace.
ScalarField random_stream_function(const Grid& grid, std::uint64_t seed);

/// Runs `trials` seeded divergence-free perturbations of the flux (d = 2).
OptimalityReport optimality_probe(const FluxField& base, const ScalarField& f, int trials, std::uint64_t seed);

}  // namespace beckmann
