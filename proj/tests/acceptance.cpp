// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "beckmann/approx.hpp"
#include "beckmann/density.hpp"
#include "beckmann/flow.hpp"
#include "beckmann/flux.hpp"
#include "beckmann/parametric.hpp"
#include "beckmann/path.hpp"
#include "beckmann/poisson.hpp"
#include "beckmann/vectorfield.hpp"
#include "cli/app.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace beckmann;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kPoissonSlope = 2.0, kPoissonSlopeTol = 0.2, kPoissonSeconds = 30.0;
constexpr double kConstraintSlope = 1.5, kCompatTol = 1e-10;
constexpr int kOptimalityTrials = 16;
constexpr std::uint64_t kOptimalitySeed = 20240611;
constexpr double kMarginTol = 1e-8, kCrossTol = 1e-3;
constexpr double kTransportL1 = 0.02, kTransportRefine = 0.5, kTransportSeconds = 120.0;
constexpr double kContinuitySlope = 2.0, kContinuitySlopeTol = 0.3;
constexpr double kFisherRaoMass = 1e-10, kFisherRaoNorm = 1e-10;
constexpr double kStabilityDrift = 0.25;
constexpr std::size_t kExhaustive = 2'000'000;
constexpr double kApproxSlope = -3.5, kApproxGap = -1.0, kApproxGapTol = 0.5, kTransportFitSlope = -2.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
            pass = false;
        if (!detail.empty())
            detail += "; ";
        detail += what + (ok ? "" : " [violated]");
    }
};

std::vector<double> slope_h(const std::vector<int>& ns)
{
    std::vector<double> h;
    for (int n : ns)
        h.push_back(1.0 / n);
    return h;
}

Density bump(const Grid& g, std::array<double, 2> c, double sigma)
{
    return gaussian_bump(g, std::span<const double>(c.data(), static_cast<std::size_t>(g.dim())), sigma);
}

// Density pairs used by the constraint and path criteria.
struct Pair {
    std::string name;
    std::function<Density(const Grid&)> nu, mu;
    int d;
};

std::vector<Pair> density_pairs()
{
    return {
        {"bumps-1d", fixture::source, fixture::target, 1},
        {"bumps-2d", fixture::source, fixture::target, 2},
        {"uniform-to-bump-2d", uniform_density, [](const Grid& g) { return bump(g, {0.6, 0.45}, 0.15); }, 2},
    };
}

Verdict poisson_order()
{
    Verdict v;
    const auto t0 = Clock::now();
    const std::vector<int> ns{32, 64, 128, 256};
    for (int d : {1, 2}) {
        std::vector<double> err;
        for (int n : ns) {
            Grid g(d, n);
            auto f = ScalarField::sample(g, [d](const std::array<double, 2>& x) {
                return d == 1 ? std::cos(kPi * x[0]) : std::cos(kPi * x[0]) * std::cos(kPi * x[1]);
            });
            const double scale = -1.0 / (d * kPi * kPi);
            const auto pot = solve_neumann(NeumannProblem(f));
            double e = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k)
                e = std::max(e, std::abs(pot.u[k] - scale * f[k]));
            err.push_back(e);
        }
        const double s = oracle::loglog_slope(slope_h(ns), err);
        v.require(std::abs(s - kPoissonSlope) <= kPoissonSlopeTol, "d=" + std::to_string(d) + " slope " + fmt(s));
    }
    const double secs = seconds_since(t0);
    v.require(secs < kPoissonSeconds, "runtime " + fmt(secs) + " s");
    return v;
}

Verdict constraint()
{
    Verdict v;
    const std::vector<int> ns{32, 64, 128, 256};
    double worst_compat = 0.0;
    for (const auto& p : density_pairs()) {
        std::vector<double> div, wall;
        for (int n : ns) {
            Grid g(p.d, n);
            const auto f = p.mu(g).field() - p.nu(g).field();
            worst_compat = std::max(worst_compat, std::abs(integrate(f)));
            const auto w = flux_from_potential(solve_neumann(NeumannProblem(f)), f);
            div.push_back(w.div_residual_inf);
            wall.push_back(w.boundary_flux_inf);
        }
        const double sd = oracle::loglog_slope(slope_h(ns), div);
        const double sw = oracle::loglog_slope(slope_h(ns), wall);
        v.require(sd >= kConstraintSlope, p.name + " div slope " + fmt(sd));
        v.require(sw >= kConstraintSlope, p.name + " wall slope " + fmt(sw));
    }
    v.require(worst_compat <= kCompatTol, "max |int f| " + fmt(worst_compat));
    return v;
}

Verdict optimality()
{
    Verdict v;
    Grid g(2, 64);
    const auto f = fixture::target(g).field() - fixture::source(g).field();
    const auto w = flux_from_potential(solve_neumann(NeumannProblem(f)), f);
    const auto rep = optimality_probe(w, f, kOptimalityTrials, kOptimalitySeed);
    double worst_gap = 1e300, worst_cross = 0.0;
    for (const auto& t : rep.trials) {
        // J(w + v) - J(w) - J(v), recomputed from the objectives.
        worst_gap = std::min(worst_gap, t.objective_combined - t.objective_base - t.objective_perturb);
        worst_cross = std::max(worst_cross, std::abs(t.cross_term));
    }
    v.require(rep.trials.size() == static_cast<std::size_t>(kOptimalityTrials),
              std::to_string(rep.trials.size()) + " trials");
    v.require(worst_gap >= -kMarginTol, "min J(w+v)-J(w)-J(v) " + fmt(worst_gap));
    v.require(worst_cross <= kCrossTol, "max |int w.v| " + fmt(worst_cross));
    return v;
}

double linear_transport_l1(int n, int steps)
{
    Grid g(2, n);
    const auto nu = fixture::source(g), mu = fixture::target(g);
    const auto f = mu.field() - nu.field();
    const auto tf = linear_transport_field(flux_from_potential(solve_neumann(NeumannProblem(f)), f),
                                           ProbabilityPath::linear(nu, mu), {0.0, 1.0});
    FlowOptions opt;
    opt.steps = steps;
    const auto fm = integrate_jacobians(integrate_flow(tf, grid_particles(g), opt), tf);
    const auto push = pushforward_density(fm, fm.time_index(1.0), nu);
    // L1 by direct midpoint summation.
    double l1 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        l1 += std::abs(push.density[k] - mu[k]);
    return l1 * g.h() * g.h();
}

Verdict transport()
{
    Verdict v;
    const auto t0 = Clock::now();
    const double coarse = linear_transport_l1(128, 256);
    const double fine = linear_transport_l1(256, 512);
    const double secs = seconds_since(t0);
    v.require(coarse <= kTransportL1, "L1 n=128 " + fmt(coarse));
    v.require(fine <= kTransportRefine * coarse, "L1 n=256 " + fmt(fine) + " ratio " + fmt(fine / coarse));
    v.require(secs < kTransportSeconds, "runtime " + fmt(secs) + " s");
    return v;
}

Verdict continuity()
{
    Verdict v;
    const std::vector<int> ns{32, 64, 128};
    const auto nodes = uniform_nodes(11);
    for (const bool fisher : {false, true}) {
        std::vector<double> res;
        for (int n : ns) {
            Grid g(2, n);
            const auto nu = fixture::source(g), mu = fixture::target(g);
            TransportField tf = [&] {
                if (fisher)
                    return path_transport_field(ProbabilityPath::fisher_rao(nu, mu), nodes);
                const auto f = mu.field() - nu.field();
                return linear_transport_field(flux_from_potential(solve_neumann(NeumannProblem(f)), f),
                                              ProbabilityPath::linear(nu, mu), nodes);
            }();
            double worst = 0.0;
            for (int i = 1; i <= 9; ++i)
                worst = std::max(worst, continuity_residual(tf, i / 10.0));
            res.push_back(worst);
        }
        const double s = oracle::loglog_slope(slope_h(ns), res);
        v.require(std::abs(s - kContinuitySlope) <= kContinuitySlopeTol,
                  std::string(fisher ? "fisher-rao" : "linear") + " slope " + fmt(s));
    }
    return v;
}

Verdict fisher_rao()
{
    Verdict v;
    double worst_mass = 0.0, worst_norm = 0.0, worst_floor = 1e300;
    for (const auto& p : density_pairs()) {
        Grid g(p.d, 64);
        const auto nu = p.nu(g), mu = p.mu(g);
        const auto path = ProbabilityPath::fisher_rao(nu, mu);
        const double cell = std::pow(g.h(), g.dim());
        // kappa / (K |Omega|) from the endpoint arrays; |Omega| = 1.
        double kappa = 1e300, big_k = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            kappa = std::min({kappa, nu[k], mu[k]});
            big_k = std::max({big_k, nu[k], mu[k]});
        }
        for (double t : uniform_nodes(11)) {
            double mass = 0.0, z = 0.0;
            const auto rd = path_derivative(path, t).rho_dot;
            for (std::size_t k = 0; k < g.size(); ++k) {
                mass += rd[k];
                z += std::pow(nu[k], 1.0 - t) * std::pow(mu[k], t);
            }
            worst_mass = std::max(worst_mass, std::abs(mass * cell));
            worst_norm = std::max(worst_norm, z * cell - 1.0);
            worst_floor = std::min(worst_floor, path_field(path, t).min() - kappa / big_k);
        }
    }
    v.require(worst_mass <= kFisherRaoMass, "max |int rho_dot| " + fmt(worst_mass));
    v.require(worst_norm <= kFisherRaoNorm, "max ||rho_mu^t rho_nu^(1-t)||_1 - 1 " + fmt(worst_norm));
    v.require(worst_floor >= 0.0, "min rho_t - kappa/K " + fmt(worst_floor));
    return v;
}

Verdict parametric()
{
    Verdict v;
    std::vector<double> ratios;
    for (int n : {32, 64}) {
        Grid g(2, n);
        const auto fam = shifting_bump_family(g, 9);
        const auto rep = stability_ratios(fam, solve_family(fam), 0, 0.5, 0.5);
        ratios.push_back(rep.max_ratio.value_or(std::nan("")));
    }
    const double drift = std::abs(ratios[1] - ratios[0]) / ratios[0];
    v.require(drift < kStabilityDrift, "max ratio " + fmt(ratios[0]) + " -> " + fmt(ratios[1]) + ", drift " + fmt(drift));

    // Joint norm <= Banach-valued norm, exhaustive pairs on coarse grids.
    int checked = 0, violated = 0;
    double worst = 0.0;
    for (int d : {1, 2}) {
        Grid g(d, d == 1 ? 32 : 12);
        const auto nu = fixture::source(g);
        std::vector<ParametricFamily> families{shifting_bump_family(g, 6), scaling_family(nu, fixture::target(g), 6),
                                               ParametricFamily::on_tensor({theta_axis(6)}, nu,
                                                                           [&](const Theta&) { return nu; })};
        for (const auto& fam : families)
            for (const auto& field : {family_rhs_field(fam), family_potential_field(fam, solve_family(fam))})
                for (int k : {0, 1}) {
                    const double joint = joint_holder_estimate(field, k, 0.5, kExhaustive).norm;
                    const double banach = banach_holder_estimate(field, k, k, 0.5, 0.5, kExhaustive).norm;
                    ++checked;
                    if (joint > banach)
                        ++violated;
                    if (banach > 0.0)
                        worst = std::max(worst, joint / banach);
                }
    }
    v.require(violated == 0,
              "inclusion " + std::to_string(checked - violated) + "/" + std::to_string(checked) + ", max joint/banach " +
                  fmt(worst));
    return v;
}

Verdict approximation()
{
    Verdict v;
    const std::vector<int> ks{4, 8, 16, 32};
    AnalyticTarget sine{1, 1, [](std::span<const double> x, std::span<double> val, std::span<double> j) {
                            val[0] = std::sin(2 * kPi * x[0]);
                            j[0] = 2 * kPi * std::cos(2 * kPi * x[0]);
                        }};
    AnalyticTarget smooth{2, 2, [](std::span<const double> x, std::span<double> val, std::span<double> j) {
                              const double e = std::exp(x[0] * x[1]);
                              val[0] = std::sin(3 * x[0]) * std::cos(2 * x[1]);
                              val[1] = e;
                              j[0] = 3 * std::cos(3 * x[0]) * std::cos(2 * x[1]);
                              j[1] = -2 * std::sin(3 * x[0]) * std::sin(2 * x[1]);
                              j[2] = x[1] * e;
                              j[3] = x[0] * e;
                          }};
    for (const auto& [name, target] : {std::pair{"sine", sine}, std::pair{"smooth", smooth}}) {
        const double s0 = rate_study(target, ks, 0).slope;
        const double s1 = rate_study(target, ks, 1).slope;
        v.require(s0 <= kApproxSlope, std::string(name) + " l0 slope " + fmt(s0));
        v.require(std::abs((s0 - s1) - kApproxGap) <= kApproxGapTol, std::string(name) + " gap " + fmt(s0 - s1));
    }

    Grid g(2, 128);
    const auto nu = fixture::source(g), mu = fixture::target(g);
    const auto f = mu.field() - nu.field();
    const auto tf = linear_transport_field(flux_from_potential(solve_neumann(NeumannProblem(f)), f),
                                           ProbabilityPath::linear(nu, mu), {0.0, 0.5, 1.0});
    std::vector<double> ax(static_cast<std::size_t>(g.n()));
    for (int i = 0; i < g.n(); ++i)
        ax[static_cast<std::size_t>(i)] = g.coord(i);
    SampledField data{{ax, ax}, 2, std::vector<double>(2 * g.size())};
    for (std::size_t k = 0; k < g.size(); ++k)
        for (int a = 0; a < 2; ++a)
            data.values[2 * k + static_cast<std::size_t>(a)] = tf.slices[1][a][k];
    const double st = rate_study(data, ks, 0).slope;
    v.require(st <= kTransportFitSlope, "transport l0 slope " + fmt(st));
    return v;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism()
{
    Verdict v;
    const std::vector<std::vector<std::string>> runs{
        {"solve", "--set", "grid.n=32", "--set", "optimality.trials=4"},
        {"flow", "--set", "grid.n=24", "--set", "flow.steps=24", "--set", "path.kind=fisher-rao", "--set",
         "path.node_count=5"},
        {"convergence", "--set", "convergence.study=flux", "--set", "convergence.n_list=16,32"},
        {"sweep", "--set", "family.n_list=16", "--set", "family.nodes=4"},
        {"approx", "--set", "approx.target=transport", "--set", "grid.n=96"},
        {"validate-path", "--set", "path.kind=fisher-rao", "--format", "json"},
    };
    const auto root = fs::temp_directory_path() / "beckmann_acceptance_determinism";
    int identical = 0, files = 0;
    for (const auto& args : runs) {
        fs::path dirs[2];
        for (int r = 0; r < 2; ++r) {
            dirs[r] = root / (args[0] + std::to_string(r));
            fs::remove_all(dirs[r]);
            auto full = args;
            full.insert(full.end(), {"--out", dirs[r].string(), "--threads", "1", "--seed", "42"});
            std::ostringstream out, err;
            if (cli::run(full, out, err) != 0) {
                v.require(false, args[0] + " exited nonzero: " + err.str());
                continue;
            }
        }
        bool same = true;
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            if (e.path().filename() == "timings.json")
                continue;
            ++files;
            same = same && slurp(e.path()) == slurp(dirs[1] / e.path().filename());
        }
        identical += same;
        if (!same)
            v.require(false, args[0] + " differs");
    }
    v.require(identical == static_cast<int>(runs.size()),
              std::to_string(identical) + "/" + std::to_string(runs.size()) + " subcommands, " +
                  std::to_string(files) + " files compared");
    fs::remove_all(root);
    return v;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"poisson-order", poisson_order},   {"beckmann-constraint", constraint},
        {"optimality", optimality},         {"transport", transport},
        {"continuity-residual", continuity}, {"fisher-rao-validity", fisher_rao},
        {"parametric-stability", parametric}, {"approximation-rates", approximation},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failed += !v.pass;
        std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
