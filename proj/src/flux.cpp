#include "beckmann/flux.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "beckmann/parallel.hpp"

namespace beckmann {

FluxField flux_from_potential(const Potential& u, const ScalarField& f)
{
    if (!(u.u.grid() == f.grid()))
        throw std::invalid_argument("flux_from_potential: grid mismatch");
    FluxField out{gradient(u.u)};
    out.div_residual_inf = (divergence(out.w) - f).max_abs();
    out.boundary_flux_inf = boundary_normal_flux(out.w);
    out.objective = beckmann_objective(out.w);
    return out;
}

double beckmann_objective(const VectorField& v) { return 0.5 * integrate(v.norm_squared()); }

double inner_product(const VectorField& v1, const VectorField& v2)
{
    if (!(v1.grid() == v2.grid()))
        throw std::invalid_argument("inner_product: grid mismatch");
    ScalarField acc(v1.grid());
    for (int a = 0; a < v1.dim(); ++a)
        acc += hadamard(v1[a], v2[a]);
    return integrate(acc);
}

VectorField curl(const ScalarField& psi)
{
    if (psi.grid().dim() != 2)
        throw std::invalid_argument("curl: stream functions need d = 2");
    return VectorField({-1.0 * partial(psi, 1), partial(psi, 0)});
}

PerturbationTrial perturbation_trial(const FluxField& base, const ScalarField& f, const ScalarField& psi)
{
    const VectorField v = curl(psi);
    const VectorField combined = base.w + v;
    PerturbationTrial t;
    t.objective_base = beckmann_objective(base.w);
    t.objective_perturb = beckmann_objective(v);
    t.objective_combined = beckmann_objective(combined);
    t.cross_term = inner_product(base.w, v);
    t.margin = t.objective_combined - t.objective_base;
    t.div_residual_inf = (divergence(combined) - f).max_abs();
    t.perturb_divergence_inf = divergence(v).max_abs();
    return t;
}

namespace {

// C-infinity cutoff equal to 1 at s = 1/2, vanishing outside [margin, 1 - margin].
double cutoff(double s, double margin)
{
    const double r = (s - 0.5) / (0.5 - margin);
    if (std::abs(r) >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

constexpr double kStreamMargin = 0.1;
constexpr int kStreamModes = 3;

}  // namespace

ScalarField random_stream_function(const Grid& grid, std::uint64_t seed)
{
    if (grid.dim() != 2)
        throw std::invalid_argument("random_stream_function: d = 2 only");
    if (3.0 * grid.h() > kStreamMargin)
        throw std::invalid_argument("random_stream_function: grid too coarse for the wall margin");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    struct Mode {
        int p, q;
        double amp, phx, phy;
    };
    std::vector<Mode> modes;
    for (int p = 1; p <= kStreamModes; ++p)
        for (int q = 1; q <= kStreamModes; ++q)
            modes.push_back({p, q, normal(rng) / (p * p + q * q), phase(rng), phase(rng)});
    const double scale = 0.05 * std::exp(normal(rng));
    return ScalarField::sample(grid, [&](const std::array<double, 2>& x) {
        double s = 0.0;
        for (const auto& m : modes)
            s += m.amp * std::sin(m.p * std::numbers::pi * x[0] + m.phx) * std::sin(m.q * std::numbers::pi * x[1] + m.phy);
        return scale * cutoff(x[0], kStreamMargin) * cutoff(x[1], kStreamMargin) * s;
    });
}

OptimalityReport optimality_probe(const FluxField& base, const ScalarField& f, int trials, std::uint64_t seed)
{
    if (base.w.grid().dim() != 2)
        throw std::invalid_argument("optimality_probe: requires d = 2");
    if (trials < 1)
        throw std::invalid_argument("optimality_probe: trials must be >= 1");
    OptimalityReport rep;
    rep.trials.resize(static_cast<std::size_t>(trials));
    parallel_for(rep.trials.size(), [&](std::size_t i) {
        const auto psi = random_stream_function(f.grid(), seed + i);
        rep.trials[i] = perturbation_trial(base, f, psi);
    });
    rep.min_margin = rep.trials.front().margin;
    for (const auto& t : rep.trials) {
        rep.min_margin = std::min(rep.min_margin, t.margin);
        rep.max_abs_cross = std::max(rep.max_abs_cross, std::abs(t.cross_term));
    }
    return rep;
}

}  // namespace beckmann
