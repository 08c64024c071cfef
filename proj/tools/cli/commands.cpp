#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "beckmann/approx.hpp"
#include "beckmann/density.hpp"
#include "beckmann/flow.hpp"
#include "beckmann/flux.hpp"
#include "beckmann/parametric.hpp"
#include "beckmann/path.hpp"
#include "beckmann/poisson.hpp"
#include "beckmann/vectorfield.hpp"

namespace cli {

using namespace beckmann;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr long kMaxN = 4096;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- config pieces

Schema grid_keys(const std::string& n)
{
    return {{"grid", "d", "2", "space dimension, 1 or 2"}, {"grid", "n", n, "nodes per axis"}};
}

Schema density_keys(const std::string& section)
{
    return {{section, "kind", "gaussian", "gaussian or uniform"},
            {section, "center", "", "one entry per axis, or one for all axes; empty selects the default bump"},
            {section, "sigma", "", "bump width; empty selects the default bump"},
            {section, "floor", "1e-3", "clipping floor before normalization"}};
}

Schema solver_keys()
{
    return {{"solver", "cg_tol", "1e-10", "CG tolerance relative to max|f|"},
            {"solver", "max_iter", "0", "0 selects 20 times the node count"},
            {"solver", "correct_small_mean", "false", "remove a small mean of f instead of failing"}};
}

Schema path_keys()
{
    return {{"path", "kind", "linear", "linear or fisher-rao"},
            {"path", "literal", "false", "fisher-rao only: drop the normalization term of the time derivative"},
            {"path", "node_rule", "chebyshev", "time nodes of the velocity table: chebyshev or uniform"},
            {"path", "node_count", "17", "number of time nodes"}};
}

Schema join(std::initializer_list<Schema> parts)
{
    Schema out;
    for (const auto& p : parts)
        out.insert(out.end(), p.begin(), p.end());
    return out;
}

struct GridSpec {
    int d = 2;
    int n = 64;
    Grid grid() const { return Grid(d, n); }
};

GridSpec read_grid(const Config& c, bool need_n = true)
{
    GridSpec g;
    g.d = static_cast<int>(c.integer("grid.d", 1, 2));
    if (need_n)
        g.n = static_cast<int>(c.integer("grid.n", 4, kMaxN));
    return g;
}

struct DensitySpec {
    std::string kind;
    std::vector<double> center;
    double sigma = 0.3;
    double floor = kDefaultDensityFloor;

    Density build(const Grid& g) const
    {
        if (kind == "uniform")
            return uniform_density(g);
        return gaussian_bump(g, std::span<const double>(center.data(), static_cast<std::size_t>(g.dim())), sigma,
                             floor);
    }
};

DensitySpec read_density(const Config& c, const std::string& section, int d)
{
    // Default bumps: 1D source 0.3 (width 0.2), target 0.7 (0.25); 2D (0.35, 0.4) and (0.65, 0.6), width 0.3.
    const bool is_source = section == "source";
    DensitySpec s;
    s.kind = c.choice(section + ".kind", {"gaussian", "uniform"});
    s.center = c.reals(section + ".center");
    if (s.center.empty()) {
        if (d == 1)
            s.center = {is_source ? 0.3 : 0.7};
        else
            s.center = is_source ? std::vector<double>{0.35, 0.4} : std::vector<double>{0.65, 0.6};
    }
    std::string echo;
    for (double x : s.center)
        echo += (echo.empty() ? "" : ",") + format_number(x);
    c.resolve_default(section + ".center", echo);
    if (s.center.size() == 1)
        s.center.assign(static_cast<std::size_t>(d), s.center[0]);
    if (s.center.size() != static_cast<std::size_t>(d))
        throw ConfigError(section + ".center: expected 1 or " + std::to_string(d) + " entries");
    for (double x : s.center)
        if (!(x >= 0.0 && x <= 1.0))
            throw ConfigError(section + ".center: entries must lie in [0, 1]");
    if (c.str(section + ".sigma").empty()) {
        s.sigma = d == 2 ? 0.3 : (is_source ? 0.2 : 0.25);
        c.resolve_default(section + ".sigma", format_number(s.sigma));
    }
    else
        s.sigma = c.real_in(section + ".sigma", 0.0, 10.0);
    s.floor = c.real_in(section + ".floor", 0.0, 1.0);
    return s;
}

SolverOptions read_solver(const Config& c)
{
    SolverOptions o;
    o.cg_tol = c.real_in("solver.cg_tol", 0.0, 1.0);
    o.max_iter = c.integer("solver.max_iter", 0, 1L << 40);
    o.correct_small_mean = c.boolean("solver.correct_small_mean");
    return o;
}

struct PathSpec {
    std::string kind;
    bool literal = false;
    std::vector<double> nodes;
};

PathSpec read_path(const Config& c)
{
    PathSpec p;
    p.kind = c.choice("path.kind", {"linear", "fisher-rao"});
    p.literal = c.boolean("path.literal");
    if (p.literal && p.kind != "fisher-rao")
        throw ConfigError("path.literal: only meaningful for path.kind = fisher-rao");
    const auto rule = c.choice("path.node_rule", {"chebyshev", "uniform"});
    const int m = static_cast<int>(c.integer("path.node_count", 2, 1025));
    p.nodes = rule == "chebyshev" ? chebyshev_nodes(m) : uniform_nodes(m);
    return p;
}

ProbabilityPath build_path(const PathSpec& p, Density nu, Density mu)
{
    if (p.kind == "fisher-rao")
        return ProbabilityPath::fisher_rao(std::move(nu), std::move(mu), p.literal);
    return ProbabilityPath::linear(std::move(nu), std::move(mu));
}

TransportField build_transport(const PathSpec& spec, const ProbabilityPath& path, const SolverOptions& solver)
{
    if (path.kind() == PathKind::Linear) {
        const auto f = path.rho_mu().field() - path.rho_nu().field();
        return linear_transport_field(flux_from_potential(solve_neumann(NeumannProblem(f), solver), f), path,
                                      spec.nodes);
    }
    return path_transport_field(path, spec.nodes, solver);
}

std::vector<int> to_ints(const std::vector<long>& v) { return {v.begin(), v.end()}; }

void require_increasing(const std::vector<long>& v, const std::string& name, std::size_t min_count)
{
    if (v.size() < min_count)
        throw ConfigError(name + ": needs at least " + std::to_string(min_count) + " entries");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1])
            throw ConfigError(name + ": entries must increase strictly");
}

// ---------------------------------------------------------------- table helpers

void node_cells(std::vector<Cell>& row, const Grid& g, std::size_t k)
{
    const auto ij = g.multi_index(k);
    const auto x = g.node(k);
    row.insert(row.end(), {Cell(long{ij[0]}), Cell(long{ij[1]}), Cell(x[0]), Cell(x[1])});
}

double component(const VectorField& v, int a, std::size_t k) { return a < v.dim() ? v[a][k] : 0.0; }

/// Least-squares slope of log error against log spacing; NaN if any error is not positive.
double fitted_slope(const std::vector<double>& h, const std::vector<double>& e)
{
    const std::size_t m = h.size();
    if (m < 2)
        return kNaN;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (!(e[i] > 0.0))
            return kNaN;
        const double x = std::log(h[i]), y = std::log(e[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dm = static_cast<double>(m);
    return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

double max_distance(const std::vector<Point>& a, const std::vector<Point>& b)
{
    double m = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p)
        m = std::max(m, std::hypot(a[p][0] - b[p][0], a[p][1] - b[p][1]));
    return m;
}

// ---------------------------------------------------------------- solve

Schema solve_schema()
{
    return join({grid_keys("64"),
                 {{"problem", "rhs", "densities", "densities, manufactured or constant"},
                  {"problem", "value", "1", "value of a constant right-hand side"},
                  {"optimality", "trials", "0", "divergence-free perturbation trials (d = 2)"}},
                 density_keys("source"), density_keys("target"), solver_keys()});
}

Runner prepare_solve(const Config& c, long seed)
{
    const auto gs = read_grid(c);
    const auto rhs = c.choice("problem.rhs", {"densities", "manufactured", "constant"});
    const double value = c.real("problem.value");
    const int trials = static_cast<int>(c.integer("optimality.trials", 0, 10000));
    if (trials > 0 && gs.d != 2)
        throw ConfigError("optimality.trials: perturbation trials need grid.d = 2");
    const auto src = read_density(c, "source", gs.d);
    const auto tgt = read_density(c, "target", gs.d);
    const auto solver = read_solver(c);

    return [=](RunWriter& out) {
        const Grid g = gs.grid();
        ScalarField f(g);
        if (rhs == "densities")
            f = tgt.build(g).field() - src.build(g).field();
        else if (rhs == "manufactured")
            f = manufactured_rhs(g);
        else
            f = ScalarField(g, value);

        const auto pot = solve_neumann(NeumannProblem(f), solver);
        const auto flux = flux_from_potential(pot, f);
        out.mark("solve");

        Table potential{"potential", {"i", "j", "x", "y", "f", "u"}, {}};
        Table fl{"flux", {"i", "j", "x", "y", "w_x", "w_y"}, {}};
        for (std::size_t k = 0; k < g.size(); ++k) {
            std::vector<Cell> r;
            node_cells(r, g, k);
            auto r2 = r;
            r.insert(r.end(), {f[k], pot.u[k]});
            r2.insert(r2.end(), {component(flux.w, 0, k), component(flux.w, 1, k)});
            potential.add(std::move(r));
            fl.add(std::move(r2));
        }
        out.write(potential);
        out.write(fl);

        const double exact_err =
            rhs == "manufactured" ? (pot.u - manufactured_solution(g)).max_abs() : kNaN;
        Table res{"residuals",
                  {"d", "n", "h", "iterations", "solve_residual_inf", "div_residual_inf", "boundary_flux_inf",
                   "objective", "mean_correction", "rhs_integral", "solution_error_inf"},
                  {}};
        res.add({long{g.dim()}, long{g.n()}, g.h(), pot.iterations, pot.residual_inf, flux.div_residual_inf,
                 flux.boundary_flux_inf, flux.objective, pot.mean_correction, integrate(f), exact_err});
        out.write(res);

        if (trials > 0) {
            const auto rep = optimality_probe(flux, f, trials, static_cast<std::uint64_t>(seed));
            Table opt{"optimality",
                      {"trial", "objective_base", "objective_perturb", "objective_combined", "cross_term", "margin",
                       "div_residual_inf", "perturb_divergence_inf"},
                      {}};
            for (std::size_t t = 0; t < rep.trials.size(); ++t) {
                const auto& tr = rep.trials[t];
                opt.add({static_cast<long>(t), tr.objective_base, tr.objective_perturb, tr.objective_combined,
                         tr.cross_term, tr.margin, tr.div_residual_inf, tr.perturb_divergence_inf});
            }
            out.write(opt);
            out.mark("optimality");
        }
    };
}

// ---------------------------------------------------------------- flow

Schema flow_schema()
{
    return join({grid_keys("64"), density_keys("source"), density_keys("target"),
                 path_keys(), solver_keys(),
                 {{"flow", "steps", "128", "RK4 steps per unit time"},
                  {"flow", "output_times", "0.5,1", "report times in (0, 1], on the step lattice"},
                  {"flow", "snapshots", "true", "write density and velocity snapshots"}}});
}

std::vector<double> read_output_times(const Config& c, int steps)
{
    auto ts = c.reals("flow.output_times");
    if (ts.empty())
        throw ConfigError("flow.output_times: at least one time is required");
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        if (!(t > 0.0 && t <= 1.0))
            throw ConfigError("flow.output_times: times must lie in (0, 1]");
        if (i > 0 && t <= ts[i - 1])
            throw ConfigError("flow.output_times: times must increase strictly");
        const double s = t * steps;
        if (std::abs(s - std::round(s)) > 1e-9 * steps)
            throw ConfigError("flow.output_times: " + format_number(t) + " is not a multiple of 1/flow.steps");
    }
    return ts;
}

Runner prepare_flow(const Config& c, long)
{
    const auto gs = read_grid(c);
    const auto src = read_density(c, "source", gs.d);
    const auto tgt = read_density(c, "target", gs.d);
    const auto path_spec = read_path(c);
    const auto solver = read_solver(c);
    const int steps = static_cast<int>(c.integer("flow.steps", 8, 1 << 20));
    const auto times = read_output_times(c, steps);
    const bool snapshots = c.boolean("flow.snapshots");

    return [=](RunWriter& out) {
        const Grid g = gs.grid();
        const auto nu = src.build(g);
        const auto path = build_path(path_spec, nu, tgt.build(g));

        const auto report = validate_path(path, path_spec.nodes);
        Table pt{"path", {"t", "mass", "min", "max", "derivative_mass_defect"}, {}};
        for (const auto& r : report.nodes)
            pt.add({r.t, r.mass, r.min_value, r.max_value, r.derivative_mass_defect});
        out.write(pt);

        const auto tf = build_transport(path_spec, path, solver);
        out.mark("transport_field");
        Table cont{"continuity", {"t", "continuity_residual", "flux_boundary_inf", "velocity_wall_flux"}, {}};
        for (std::size_t j = 0; j < tf.t_nodes.size(); ++j) {
            const double t = tf.t_nodes[j];
            // The residual is defined for interior times only; the ends get nan.
            cont.add({t, t > 0.0 && t < 1.0 ? continuity_residual(tf, t) : kNaN, tf.flux_boundary[j],
                      velocity_wall_flux(tf, j)});
        }
        out.write(cont);

        FlowOptions opt;
        opt.steps = steps;
        opt.output_times = times;
        const auto fm = integrate_jacobians(integrate_flow(tf, grid_particles(g), opt), tf);
        out.mark("flow");

        Table tr{"transport",
                 {"t", "reference", "l1", "linf", "mass_defect", "widened", "projection_events", "min_det"},
                 {}};
        Table snap{"snapshots", {"t", "i", "j", "x", "y", "pushed", "reference"}, {}};
        Table vel{"velocity", {"t", "i", "j", "x", "y", "xi_x", "xi_y"}, {}};
        auto add_snapshot = [&](double t, const ScalarField& pushed, const ScalarField& ref) {
            const auto xi = tf.velocity_at(t);
            for (std::size_t k = 0; k < g.size(); ++k) {
                std::vector<Cell> r{t};
                node_cells(r, g, k);
                auto r2 = r;
                r.insert(r.end(), {pushed[k], ref[k]});
                r2.insert(r2.end(), {component(xi, 0, k), component(xi, 1, k)});
                snap.add(std::move(r));
                vel.add(std::move(r2));
            }
        };
        if (snapshots)
            add_snapshot(0.0, nu.field(), nu.field());
        for (std::size_t s = 0; s < times.size(); ++s) {
            const double t = times[s];
            const auto push = pushforward_density(fm, fm.time_index(t), nu);
            const auto ref = eval_path(path, t);
            const auto err = transport_error(push.density, ref.field());
            // Projection events up to t: the same step lattice stopped at t.
            FlowOptions upto = opt;
            upto.t_end = t;
            upto.output_times = {t};
            const long events = integrate_flow(tf, grid_particles(g), upto).projection_events;
            tr.add({t, std::string(t == 1.0 ? "target" : "path"), err.l1, err.linf, push.mass_defect,
                    static_cast<long>(push.widened), events, fm.min_det});
            if (snapshots)
                add_snapshot(t, push.density, ref.field());
        }
        out.write(tr);
        if (snapshots) {
            out.write(snap);
            out.write(vel);
        }
        out.mark("pushforward");
    };
}

// ---------------------------------------------------------------- convergence

Schema convergence_schema()
{
    return join({{{"convergence", "study", "poisson", "poisson, flux, flow or flow-steps"},
                  {"convergence", "n_list", "32,64,128,256", "grid sizes (poisson, flux, flow)"},
                  {"convergence", "steps_list", "8,16,32,64", "step counts (flow-steps), each >= 8"},
                  {"convergence", "steps_factor", "2", "flow: steps = steps_factor * n"},
                  {"convergence", "reference_steps", "0", "flow-steps reference; 0 selects 16 * max(steps_list)"}},
                 grid_keys("64"), density_keys("source"), density_keys("target"),
                 path_keys(), solver_keys()});
}

Runner prepare_convergence(const Config& c, long)
{
    const auto study = c.choice("convergence.study", {"poisson", "flux", "flow", "flow-steps"});
    const bool by_steps = study == "flow-steps";
    const auto gs = read_grid(c, by_steps);
    std::vector<long> ns, steps_list;
    if (by_steps) {
        steps_list = c.integers("convergence.steps_list", 8, 1 << 20);
        require_increasing(steps_list, "convergence.steps_list", 2);
    } else {
        ns = c.integers("convergence.n_list", 4, kMaxN);
        require_increasing(ns, "convergence.n_list", 2);
    }
    const long factor = c.integer("convergence.steps_factor", 1, 1024);
    long ref_steps = c.integer("convergence.reference_steps", 0, 1 << 22);
    if (by_steps) {
        if (ref_steps == 0)
            ref_steps = 16 * steps_list.back();
        if (ref_steps <= steps_list.back())
            throw ConfigError("convergence.reference_steps: must exceed every entry of steps_list");
    }
    const auto src = read_density(c, "source", gs.d);
    const auto tgt = read_density(c, "target", gs.d);
    const auto path_spec = read_path(c);
    const auto solver = read_solver(c);

    return [=](RunWriter& out) {
        Table tab{"convergence", {"study", "quantity", "n", "steps", "h", "error", "rate"}, {}};
        // quantity -> (spacing, error) in insertion order
        std::vector<std::pair<std::string, std::pair<std::vector<double>, std::vector<double>>>> series;
        auto record = [&](const std::string& q, long n, long s, double h, double e) {
            auto it = std::find_if(series.begin(), series.end(), [&](const auto& p) { return p.first == q; });
            if (it == series.end()) {
                series.push_back({q, {}});
                it = series.end() - 1;
            }
            auto& [hs, es] = it->second;
            const double rate = es.empty() ? kNaN : std::log(e / es.back()) / std::log(h / hs.back());
            hs.push_back(h);
            es.push_back(e);
            tab.add({study, q, n, s, h, e, rate});
        };

        if (study == "poisson" || study == "flux") {
            for (long n : ns) {
                const Grid g(gs.d, static_cast<int>(n));
                const auto f = manufactured_rhs(g);
                const auto pot = solve_neumann(NeumannProblem(f), solver);
                if (study == "poisson") {
                    record("solution_error", n, 0, g.h(), (pot.u - manufactured_solution(g)).max_abs());
                    continue;
                }
                const auto w = flux_from_potential(pot, f);
                double werr = 0.0;
                for (std::size_t k = 0; k < g.size(); ++k) {
                    const auto x = g.node(k);
                    for (int a = 0; a < g.dim(); ++a) {
                        double exact = -kPi * std::sin(kPi * x[static_cast<std::size_t>(a)]);
                        for (int b = 0; b < g.dim(); ++b)
                            if (b != a)
                                exact *= std::cos(kPi * x[static_cast<std::size_t>(b)]);
                        werr = std::max(werr, std::abs(w.w[a][k] - exact));
                    }
                }
                record("flux_error", n, 0, g.h(), werr);
                const auto fd = tgt.build(g).field() - src.build(g).field();
                const auto wd = flux_from_potential(solve_neumann(NeumannProblem(fd), solver), fd);
                record("div_residual", n, 0, g.h(), wd.div_residual_inf);
                record("boundary_flux", n, 0, g.h(), wd.boundary_flux_inf);
            }
        } else if (study == "flow") {
            for (long n : ns) {
                const Grid g(gs.d, static_cast<int>(n));
                const auto nu = src.build(g);
                const auto path = build_path(path_spec, nu, tgt.build(g));
                const auto tf = build_transport(path_spec, path, solver);
                FlowOptions opt;
                opt.steps = static_cast<int>(factor * n);
                const auto fm = integrate_jacobians(integrate_flow(tf, grid_particles(g), opt), tf);
                const auto push = pushforward_density(fm, fm.time_index(1.0), nu);
                const auto err = transport_error(push.density, path.rho_mu().field());
                record("l1", n, opt.steps, g.h(), err.l1);
                record("linf", n, opt.steps, g.h(), err.linf);
            }
        } else {
            const Grid g = gs.grid();
            const auto path = build_path(path_spec, src.build(g), tgt.build(g));
            const auto tf = build_transport(path_spec, path, solver);
            const auto starts = grid_particles(g);
            FlowOptions opt;
            opt.steps = static_cast<int>(ref_steps);
            const auto ref = integrate_flow(tf, starts, opt);
            for (long s : steps_list) {
                opt.steps = static_cast<int>(s);
                const auto fm = integrate_flow(tf, starts, opt);
                record("endpoint_error", g.n(), s, 1.0 / static_cast<double>(s),
                       max_distance(fm.positions_at.back(), ref.positions_at.back()));
            }
        }
        out.mark(study);
        out.write(tab);

        Table slopes{"slopes", {"study", "quantity", "slope", "points"}, {}};
        for (const auto& [q, he] : series)
            slopes.add({study, q, fitted_slope(he.first, he.second), static_cast<long>(he.first.size())});
        out.write(slopes);
    };
}

// ---------------------------------------------------------------- sweep

Schema sweep_schema()
{
    return join({{{"family", "kind", "shifting", "shifting, scaling or constant"},
                  {"family", "nodes", "9", "theta nodes"},
                  {"family", "n_list", "32,64", "grid sizes"},
                  {"family", "k", "0", "spatial order of the right-hand side norm"},
                  {"family", "alpha", "0.5", "spatial Hölder exponent"},
                  {"family", "beta", "0.5", "parameter Hölder exponent (recorded)"}},
                 {{"grid", "d", "2", "space dimension, 1 or 2"}}, density_keys("source"),
                 density_keys("target"), solver_keys()});
}

Runner prepare_sweep(const Config& c, long)
{
    const auto kind = c.choice("family.kind", {"shifting", "scaling", "constant"});
    const int nodes = static_cast<int>(c.integer("family.nodes", 2, 257));
    const auto ns = c.integers("family.n_list", 4, kMaxN);
    require_increasing(ns, "family.n_list", 1);
    const int k = static_cast<int>(c.integer("family.k", 0, 8));
    const double alpha = c.real_in("family.alpha", 0.0, 1.0);
    const double beta = c.real_in("family.beta", 0.0, 1.0, true);
    if (beta == 0.0)
        throw ConfigError("family.beta: must lie in (0, 1]");
    const auto gs = read_grid(c, false);
    const auto src = read_density(c, "source", gs.d);
    const auto tgt = read_density(c, "target", gs.d);
    const auto solver = read_solver(c);

    return [=](RunWriter& out) {
        Table pairs{"stability", {"n", "i", "j", "theta_i", "theta_j", "num", "den", "ratio"}, {}};
        Table summary{"stability_summary",
                      {"n", "family", "nodes", "pairs", "skipped", "max_ratio", "num_order", "den_order", "alpha",
                       "beta"},
                      {}};
        for (long n : ns) {
            const Grid g(gs.d, static_cast<int>(n));
            std::optional<ParametricFamily> fam;
            if (kind == "shifting") {
                fam.emplace(shifting_bump_family(g, nodes));
            } else if (kind == "scaling") {
                fam.emplace(scaling_family(src.build(g), tgt.build(g), nodes));
            } else {
                const auto nu = src.build(g);
                fam.emplace(ParametricFamily::on_tensor({theta_axis(nodes)}, nu, [&](const Theta&) { return nu; }));
            }
            const auto sols = solve_family(*fam, solver);
            const auto rep = stability_ratios(*fam, sols, k, alpha, beta);
            for (const auto& p : rep.pairs)
                pairs.add({n, static_cast<long>(p.i), static_cast<long>(p.j), fam->theta_nodes()[p.i][0],
                           fam->theta_nodes()[p.j][0], p.num, p.den, p.ratio});
            summary.add({n, kind, long{nodes}, static_cast<long>(rep.pairs.size()), static_cast<long>(rep.skipped),
                         rep.max_ratio.value_or(kNaN), long{rep.num_order}, long{rep.den_order}, rep.alpha,
                         rep.beta});
            out.mark("n=" + std::to_string(n));
        }
        out.write(pairs);
        out.write(summary);
    };
}

// ---------------------------------------------------------------- approx

Schema approx_schema()
{
    return join({{{"approx", "target", "smooth", "sine, smooth or transport"},
                  {"approx", "knots", "4,8,16,32", "knot interval counts K, at least four"},
                  {"approx", "ell", "0,1", "derivative orders, each 0 or 1"},
                  {"approx", "degree", "3", "spline degree"},
                  {"approx", "time", "0.5", "transport: time of the velocity slice"}},
                 grid_keys("128"), density_keys("source"), density_keys("target"),
                 solver_keys()});
}

AnalyticTarget sine_target()
{
    return {1, 1, [](std::span<const double> x, std::span<double> v, std::span<double> j) {
                v[0] = std::sin(2 * kPi * x[0]);
                j[0] = 2 * kPi * std::cos(2 * kPi * x[0]);
            }};
}

AnalyticTarget smooth_target()
{
    return {2, 2, [](std::span<const double> x, std::span<double> v, std::span<double> j) {
                const double e = std::exp(x[0] * x[1]);
                v[0] = std::sin(3 * x[0]) * std::cos(2 * x[1]);
                v[1] = e;
                j[0] = 3 * std::cos(3 * x[0]) * std::cos(2 * x[1]);
                j[1] = -2 * std::sin(3 * x[0]) * std::sin(2 * x[1]);
                j[2] = x[1] * e;
                j[3] = x[0] * e;
            }};
}

Runner prepare_approx(const Config& c, long)
{
    const auto target = c.choice("approx.target", {"sine", "smooth", "transport"});
    const auto knots = c.integers("approx.knots", 1, 4096);
    require_increasing(knots, "approx.knots", 4);
    const auto ells = c.integers("approx.ell", 0, 1);
    if (ells.empty())
        throw ConfigError("approx.ell: at least one order is required");
    const int degree = static_cast<int>(c.integer("approx.degree", 1, 7));
    for (long e : ells)
        if (e >= degree)
            throw ConfigError("approx.ell: derivative order must stay below approx.degree");
    const double time = c.real_in("approx.time", 0.0, 1.0, true);
    const auto gs = read_grid(c);
    const auto src = read_density(c, "source", gs.d);
    const auto tgt = read_density(c, "target", gs.d);
    const auto solver = read_solver(c);
    if (target == "transport")
        for (long k : knots)
            if (gs.n < 2 * (k + degree))
                throw ConfigError("approx.knots: transport fits need grid.n >= 2 (K + degree) for every K");

    return [=](RunWriter& out) {
        std::optional<SampledField> data;
        if (target == "transport") {
            const Grid g = gs.grid();
            const auto path = ProbabilityPath::linear(src.build(g), tgt.build(g));
            const auto f = path.rho_mu().field() - path.rho_nu().field();
            const auto tf = linear_transport_field(flux_from_potential(solve_neumann(NeumannProblem(f), solver), f),
                                                   path, {0.0, 1.0});
            const auto xi = tf.velocity_at(time);
            std::vector<double> ax(static_cast<std::size_t>(g.n()));
            for (int i = 0; i < g.n(); ++i)
                ax[static_cast<std::size_t>(i)] = g.coord(i);
            data.emplace(SampledField{std::vector<std::vector<double>>(static_cast<std::size_t>(g.dim()), ax),
                                      g.dim(), std::vector<double>(static_cast<std::size_t>(g.dim()) * g.size())});
            for (std::size_t k = 0; k < g.size(); ++k)
                for (int a = 0; a < g.dim(); ++a)
                    data->values[static_cast<std::size_t>(g.dim()) * k + static_cast<std::size_t>(a)] = xi[a][k];
        }
        Table tab{"approx", {"target", "ell", "K", "error", "residual"}, {}};
        Table slopes{"approx_slopes", {"target", "ell", "slope"}, {}};
        for (long ell : ells) {
            const auto rs = data ? rate_study(*data, to_ints(knots), static_cast<int>(ell), degree)
                                 : rate_study(target == "sine" ? sine_target() : smooth_target(), to_ints(knots),
                                              static_cast<int>(ell), degree);
            for (std::size_t i = 0; i < rs.knots.size(); ++i)
                tab.add({target, ell, long{rs.knots[i]}, rs.errors[i], rs.residuals[i]});
            slopes.add({target, ell, rs.slope});
        }
        out.mark("fits");
        out.write(tab);
        out.write(slopes);
    };
}

// ---------------------------------------------------------------- validate-path

Schema validate_schema()
{
    return join({grid_keys("64"), density_keys("source"), density_keys("target"),
                 path_keys()});
}

Runner prepare_validate(const Config& c, long)
{
    const auto gs = read_grid(c);
    const auto src = read_density(c, "source", gs.d);
    const auto tgt = read_density(c, "target", gs.d);
    const auto path_spec = read_path(c);

    return [=](RunWriter& out) {
        const Grid g = gs.grid();
        const auto path = build_path(path_spec, src.build(g), tgt.build(g));
        const auto rep = validate_path(path, path_spec.nodes);
        Table nodes{"path", {"t", "mass", "min", "max", "derivative_mass_defect", "normalizer"}, {}};
        for (const auto& r : rep.nodes)
            nodes.add({r.t, r.mass, r.min_value, r.max_value, r.derivative_mass_defect,
                       path.kind() == PathKind::FisherRao ? fisher_rao_normalizer(path, r.t) : 1.0});
        out.write(nodes);
        Table summary{"path_summary",
                      {"kind", "nodes", "kappa_path", "kappa_bound", "max_mass_error", "max_derivative_defect"},
                      {}};
        summary.add({std::string(to_string(path.kind())), static_cast<long>(rep.nodes.size()), rep.kappa_path,
                     path.kappa_path(), rep.max_mass_error, rep.max_derivative_defect});
        out.write(summary);
    };
}

}  // namespace

ScalarField manufactured_solution(const Grid& grid)
{
    return ScalarField::sample(grid, [&](const std::array<double, 2>& x) {
        double u = 1.0;
        for (int a = 0; a < grid.dim(); ++a)
            u *= std::cos(kPi * x[static_cast<std::size_t>(a)]);
        return u;
    });
}

ScalarField manufactured_rhs(const Grid& grid)
{
    const double scale = -grid.dim() * kPi * kPi;
    return ScalarField::sample(grid, [&](const std::array<double, 2>& x) {
        double u = 1.0;
        for (int a = 0; a < grid.dim(); ++a)
            u *= std::cos(kPi * x[static_cast<std::size_t>(a)]);
        return scale * u;
    });
}

const std::vector<Command>& commands()
{
    static const std::vector<Command> all{
        {"solve", "Neumann solve and flux for one right-hand side", solve_schema(), prepare_solve},
        {"flow", "transport velocity, particle flow and pushforward along a path", flow_schema(), prepare_flow},
        {"convergence", "error against resolution for the poisson, flux and flow pipelines", convergence_schema(),
         prepare_convergence},
        {"sweep", "grid stability ratios over a parameter family", sweep_schema(), prepare_sweep},
        {"approx", "spline approximation rates", approx_schema(), prepare_approx},
        {"validate-path", "mass and positivity checks of a density path", validate_schema(), prepare_validate},
    };
    return all;
}

}  // namespace cli
