#pragma once

#include <vector>

#include "beckmann/flux.hpp"
#include "beckmann/path.hpp"
#include "beckmann/poisson.hpp"

namespace beckmann {

/// Transport velocity xi(t, .) tabulated on a list of times.
///
/// The flux at time t solves div w_t = rho_dot_t with zero normal trace, and
/// the velocity is xi_t = -w_t / rho_t, so that
/// rho_dot + div(rho_t xi_t) = rho_dot - div w_t vanishes and the flow
/// carries rho_nu (t = 0) onto rho_mu (t = 1).
struct TransportField {
    std::vector<double> t_nodes;
    std::vector<VectorField> slices;      // xi at each node
    std::vector<VectorField> fluxes;      // w at each node
    std::vector<ScalarField> densities;   // rho_t at each node
    std::vector<double> flux_boundary;    // max wall normal flux of each w
    ProbabilityPath path;
    bool constant_flux = false;           // linear route: one w for all t

    const Grid& grid() const { return path.grid(); }

    /// Numerator and density at an arbitrary t, linear in t between nodes.
    VectorField flux_at(double t) const;
    ScalarField density_at(double t) const;
    /// xi(t) = -flux_at(t) / density_at(t); equals the slice at a node.
    VectorField velocity_at(double t) const;
};

/// Smallest density value accepted as a divisor.
constexpr double kDivisionFloor = 1e-12;

/// Linear path: the flux is solved once and shared by every time.
TransportField linear_transport_field(const FluxField& w, const ProbabilityPath& p, std::vector<double> t_nodes);

/// Generic route: one Neumann solve with right-hand side rho_dot_t per node.
TransportField path_transport_field(const ProbabilityPath& p, std::vector<double> t_nodes,
                                    const SolverOptions& options = {});

/// Largest |xi . eta| on the walls of slice j, taken as the wall value of the
/// normal flux over the wall value of the density (both extrapolated).
double velocity_wall_flux(const TransportField& tf, std::size_t j);

/// max |rho_dot_t + div(rho_t xi_t)| with the path's own rho_t and rho_dot_t.
double continuity_residual(const TransportField& tf, double t);

/// 0.5 (1 - cos(pi k / (m - 1))), k = 0 .. m-1.
std::vector<double> chebyshev_nodes(int m = 17);

/// Uniform nodes k / (m - 1).
std::vector<double> uniform_nodes(int m);

}  // namespace beckmann
