#include "beckmann/vectorfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "beckmann/errors.hpp"
#include "beckmann/parallel.hpp"

namespace beckmann {

namespace {

void check_nodes(const std::vector<double>& t)
{
    if (t.size() < 2 || t.front() != 0.0 || t.back() != 1.0)
        throw std::invalid_argument("transport field: time nodes must include 0 and 1");
    for (std::size_t j = 1; j < t.size(); ++j)
        if (!(t[j] > t[j - 1]))
            throw std::invalid_argument("transport field: time nodes must increase strictly");
}

VectorField divide(const VectorField& w, const ScalarField& rho, double t)
{
    if (rho.min() < kDivisionFloor) {
        std::ostringstream os;
        os << "rho_t at t = " << t << " drops to " << rho.min();
        throw DivisionFloor(os.str());
    }
    VectorField xi(w.grid());
    for (int a = 0; a < w.dim(); ++a) {
        auto out = xi[a].mutable_values();
        const auto num = w[a].values();
        const auto den = rho.values();
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = -num[k] / den[k];
    }
    return xi;
}

std::pair<std::size_t, double> locate(const std::vector<double>& ts, double t)
{
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("transport field: t outside [0,1]");
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    j = std::min(j, ts.size() - 2);
    return {j, (t - ts[j]) / (ts[j + 1] - ts[j])};
}

}  // namespace

VectorField TransportField::flux_at(double t) const
{
    const auto [j, lam] = locate(t_nodes, t);
    if (lam == 0.0)
        return fluxes[j];
    if (lam == 1.0)
        return fluxes[j + 1];
    return (1.0 - lam) * fluxes[j] + lam * fluxes[j + 1];
}

ScalarField TransportField::density_at(double t) const
{
    const auto [j, lam] = locate(t_nodes, t);
    if (lam == 0.0)
        return densities[j];
    if (lam == 1.0)
        return densities[j + 1];
    return (1.0 - lam) * densities[j] + lam * densities[j + 1];
}

VectorField TransportField::velocity_at(double t) const
{
    const auto [j, lam] = locate(t_nodes, t);
    if (lam == 0.0)
        return slices[j];
    if (lam == 1.0)
        return slices[j + 1];
    return divide(flux_at(t), density_at(t), t);
}

TransportField linear_transport_field(const FluxField& w, const ProbabilityPath& p, std::vector<double> t_nodes)
{
    if (p.kind() != PathKind::Linear)
        throw std::invalid_argument("linear_transport_field: path must be linear");
    if (!(p.kappa_path() > 0.0))
        throw std::invalid_argument("linear_transport_field: path lower bound must be positive");
    if (!(w.w.grid() == p.grid()))
        throw std::invalid_argument("linear_transport_field: grid mismatch");
    check_nodes(t_nodes);
    TransportField tf{std::move(t_nodes), {}, {}, {}, {}, p, true};
    for (double t : tf.t_nodes) {
        tf.densities.push_back(path_field(p, t));
        tf.fluxes.push_back(w.w);
        tf.flux_boundary.push_back(w.boundary_flux_inf);
        tf.slices.push_back(divide(w.w, tf.densities.back(), t));
    }
    return tf;
}

TransportField path_transport_field(const ProbabilityPath& p, std::vector<double> t_nodes, const SolverOptions& options)
{
    check_nodes(t_nodes);
    validate_path(p, t_nodes);
    const std::size_t m = t_nodes.size();
    TransportField tf{std::move(t_nodes), {}, {}, {}, {}, p, false};
    const Grid& g = p.grid();
    tf.slices.assign(m, VectorField(g));
    tf.fluxes.assign(m, VectorField(g));
    tf.densities.assign(m, ScalarField(g));
    tf.flux_boundary.assign(m, 0.0);
    parallel_for(m, [&](std::size_t j) {
        const double t = tf.t_nodes[j];
        try {
            const auto d = path_derivative(p, t);
            const auto fl = flux_from_potential(solve_neumann(NeumannProblem(d.rho_dot), options), d.rho_dot);
            tf.densities[j] = path_field(p, t);
            tf.fluxes[j] = fl.w;
            tf.flux_boundary[j] = fl.boundary_flux_inf;
            tf.slices[j] = divide(fl.w, tf.densities[j], t);
        } catch (NumericalError& e) {
            std::ostringstream os;
            os << "t = " << t;
            e.add_context(os.str());
            throw;
        }
    });
    return tf;
}

double velocity_wall_flux(const TransportField& tf, std::size_t j)
{
    double m = 0.0;
    for (int a = 0; a < tf.grid().dim(); ++a)
        for (int side : {0, 1}) {
            const auto w = wall_values(tf.fluxes[j][a], a, side);
            const auto rho = wall_values(tf.densities[j], a, side);
            for (std::size_t k = 0; k < w.size(); ++k)
                m = std::max(m, std::abs(w[k] / rho[k]));
        }
    return m;
}

double continuity_residual(const TransportField& tf, double t)
{
    if (!(t > 0.0 && t < 1.0))
        throw std::invalid_argument("continuity_residual: t must lie strictly inside (0,1)");
    const auto rho = path_field(tf.path, t);
    const auto xi = tf.velocity_at(t);
    VectorField mass_flux(tf.grid());
    for (int a = 0; a < xi.dim(); ++a)
        mass_flux[a] = hadamard(rho, xi[a]);
    return (path_derivative(tf.path, t).rho_dot + divergence(mass_flux)).max_abs();
}

std::vector<double> chebyshev_nodes(int m)
{
    if (m < 2)
        throw std::invalid_argument("chebyshev_nodes: need at least 2 nodes");
    std::vector<double> t(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
        t[static_cast<std::size_t>(k)] = 0.5 * (1.0 - std::cos(std::numbers::pi * k / (m - 1)));
    t.front() = 0.0;
    t.back() = 1.0;
    return t;
}

std::vector<double> uniform_nodes(int m)
{
    if (m < 2)
        throw std::invalid_argument("uniform_nodes: need at least 2 nodes");
    std::vector<double> t(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
        t[static_cast<std::size_t>(k)] = static_cast<double>(k) / (m - 1);
    return t;
}

}  // namespace beckmann
