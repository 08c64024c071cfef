#include "doctest.h"

#include <cmath>
#include <string>

#include "beckmann/errors.hpp"
#include "beckmann/vectorfield.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace beckmann;

namespace {

FluxField solve_flux(const ScalarField& f) { return flux_from_potential(solve_neumann(NeumannProblem(f)), f); }

TransportField linear_fixture(const Grid& g, std::vector<double> nodes)
{
    auto nu = fixture::source(g), mu = fixture::target(g);
    return linear_transport_field(solve_flux(mu.field() - nu.field()), ProbabilityPath::linear(nu, mu), std::move(nodes));
}

std::vector<double> tenth_nodes()
{
    std::vector<double> t;
    for (int k = 0; k <= 10; ++k)
        t.push_back(k / 10.0);
    return t;
}

}  // namespace

TEST_CASE("time nodes")
{
    auto c = chebyshev_nodes();
    REQUIRE(c.size() == 17);
    CHECK(c.front() == 0.0);
    CHECK(c.back() == 1.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(c[k] == doctest::Approx(1.0 - c[c.size() - 1 - k]).epsilon(1e-15));
        if (k > 0)
            CHECK(c[k] > c[k - 1]);
    }
    auto u = uniform_nodes(11);
    CHECK(u[3] == 0.3);
    Grid g(1, 16);
    CHECK_THROWS(linear_fixture(g, {0.0, 0.5}));
    CHECK_THROWS(linear_fixture(g, {0.0, 0.6, 0.4, 1.0}));
}

TEST_CASE("equal densities give zero velocity on both routes")
{
    Grid g(2, 16);
    auto nu = fixture::source(g);
    auto lin = linear_transport_field(solve_flux(ScalarField(g)), ProbabilityPath::linear(nu, nu), chebyshev_nodes(5));
    auto fr = path_transport_field(ProbabilityPath::fisher_rao(nu, nu), chebyshev_nodes(5));
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(lin.slices[j].max_abs() == 0.0);
        CHECK(fr.slices[j].max_abs() <= 1e-12);
    }
}

TEST_CASE("end slices divide the flux by the end densities")
{
    Grid g(2, 24);
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto fl = solve_flux(mu.field() - nu.field());
    auto tf = linear_transport_field(fl, ProbabilityPath::linear(nu, mu), {0.0, 0.5, 1.0});
    CHECK(tf.constant_flux);
    for (std::size_t k = 0; k < g.size(); ++k)
        for (int a = 0; a < 2; ++a) {
            CHECK(tf.slices[0][a][k] == -fl.w[a][k] / nu[k]);
            CHECK(tf.slices[2][a][k] == -fl.w[a][k] / mu[k]);
        }
}

TEST_CASE("1D slices match the CDF oracle")
{
    // Velocity of the linear path: (F_nu - F_mu) / rho_t.
    std::vector<double> hs, err;
    for (int n : {32, 64, 128}) {
        Grid g(1, n);
        auto nu = fixture::source(g), mu = fixture::target(g);
        auto tf = linear_fixture(g, {0.0, 0.4, 1.0});
        auto profile = [](double c, double s) { return [c, s](double x) { return std::exp(-(x - c) * (x - c) / (2 * s * s)); }; };
        const auto pn = profile(0.3, 0.2), pm = profile(0.7, 0.25);
        double zn = 0, zm = 0;
        for (int i = 0; i < n; ++i) {
            zn += pn(g.coord(i)) * g.h();
            zm += pm(g.coord(i)) * g.h();
        }
        double e = 0;
        for (int i = 0; i < n; ++i) {
            const double x = g.coord(i);
            const double rho_t = 0.6 * nu[static_cast<std::size_t>(i)] + 0.4 * mu[static_cast<std::size_t>(i)];
            const double exact = (oracle::simpson(pn, 0, x) / zn - oracle::simpson(pm, 0, x) / zm) / rho_t;
            e = std::max(e, std::abs(tf.slices[1][0][static_cast<std::size_t>(i)] - exact));
        }
        hs.push_back(g.h());
        err.push_back(e);
    }
    CHECK(err.back() <= 1e-3);
    CHECK(oracle::loglog_slope(hs, err) >= 1.8);
}

TEST_CASE("generic route reproduces the linear route")
{
    Grid g(2, 32);
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto p = ProbabilityPath::linear(nu, mu);
    auto a = linear_fixture(g, chebyshev_nodes(5));
    auto b = path_transport_field(p, chebyshev_nodes(5));
    CHECK_FALSE(b.constant_flux);
    for (std::size_t j = 0; j < 5; ++j)
        CHECK((a.slices[j] - b.slices[j]).max_abs() <= 1e-8 * a.slices[j].max_abs());
}

TEST_CASE("velocity between nodes")
{
    Grid g(2, 32);
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto p = ProbabilityPath::linear(nu, mu);
    auto fl = solve_flux(mu.field() - nu.field());
    std::vector<double> gaps;
    // 1/rho_t bends sharply where rho_nu is small, so the asymptotic regime starts late.
    for (int m : {33, 65, 129}) {
        auto tf = linear_transport_field(fl, p, uniform_nodes(m));
        double gap = 0.0;
        for (std::size_t j = 0; j + 1 < tf.t_nodes.size(); ++j) {
            const double t = 0.5 * (tf.t_nodes[j] + tf.t_nodes[j + 1]);
            VectorField direct(g);
            auto rho = path_field(p, t);
            for (int a = 0; a < 2; ++a)
                for (std::size_t k = 0; k < g.size(); ++k)
                    direct[a][k] = -fl.w[a][k] / rho[k];
            // The flux-over-density form is exact for the linear path.
            CHECK((tf.velocity_at(t) - direct).max_abs() <= 1e-13 * direct.max_abs());
            // Interpolating the velocity slices themselves is only second order in dt.
            auto naive = 0.5 * tf.slices[j] + 0.5 * tf.slices[j + 1];
            gap = std::max(gap, (naive - direct).max_abs());
        }
        gaps.push_back(gap);
    }
    CHECK(gaps[0] / gaps[1] == doctest::Approx(4.0).epsilon(0.15));
    CHECK(gaps[1] / gaps[2] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("division and boundary bounds")
{
    Grid g(2, 32);
    auto nu = fixture::source(g), mu = fixture::target(g);
    for (const auto& tf : {linear_fixture(g, chebyshev_nodes()),
                           path_transport_field(ProbabilityPath::fisher_rao(nu, mu), chebyshev_nodes())}) {
        const double kappa = tf.path.kappa_path();
        for (std::size_t j = 0; j < tf.t_nodes.size(); ++j) {
            CHECK(tf.slices[j].max_abs() <= tf.fluxes[j].max_abs() / kappa);
            double wall_kappa = kappa;
            for (int a = 0; a < 2; ++a)
                for (int side : {0, 1})
                    for (double r : wall_values(tf.densities[j], a, side))
                        wall_kappa = std::min(wall_kappa, r);
            CHECK(velocity_wall_flux(tf, j) <= tf.flux_boundary[j] / wall_kappa);
            CHECK(velocity_wall_flux(tf, j) <= 10 * g.h() * g.h() * tf.fluxes[j].max_abs() / kappa);
        }
    }
}

TEST_CASE("continuity residual")
{
    Grid g(2, 32);
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto f = mu.field() - nu.field();
    auto fl = solve_flux(f);
    auto tf = linear_transport_field(fl, ProbabilityPath::linear(nu, mu), tenth_nodes());
    for (double t : {0.1, 0.45, 0.9})
        CHECK(continuity_residual(tf, t) == doctest::Approx(fl.div_residual_inf).epsilon(1e-6));
    CHECK_THROWS(continuity_residual(tf, 0.0));

    auto still = linear_transport_field(solve_flux(ScalarField(g)), ProbabilityPath::linear(nu, nu), {0.0, 1.0});
    CHECK(continuity_residual(still, 0.5) == 0.0);

    std::vector<double> hs, lin_res, fr_res;
    for (int n : {32, 64, 128}) {
        Grid gn(2, n);
        auto a = fixture::source(gn), b = fixture::target(gn);
        auto lin = linear_transport_field(solve_flux(b.field() - a.field()), ProbabilityPath::linear(a, b), tenth_nodes());
        auto fr = path_transport_field(ProbabilityPath::fisher_rao(a, b), tenth_nodes());
        double ml = 0, mf = 0;
        for (int k = 1; k <= 9; ++k) {
            ml = std::max(ml, continuity_residual(lin, k / 10.0));
            mf = std::max(mf, continuity_residual(fr, k / 10.0));
        }
        hs.push_back(gn.h());
        lin_res.push_back(ml);
        fr_res.push_back(mf);
    }
    CHECK(oracle::loglog_slope(hs, lin_res) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(oracle::loglog_slope(hs, fr_res) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("vanishing densities trip the division floor")
{
    Grid g(1, 16);
    auto raw = ScalarField::sample(g, [](auto x) { return x[0] < 0.2 ? 0.0 : 1.0; });
    auto nu = normalize(raw, 1e-14);
    auto mu = uniform_density(g);
    auto fl = solve_flux(mu.field() - nu.field());
    CHECK_THROWS_AS(linear_transport_field(fl, ProbabilityPath::linear(nu, mu), {0.0, 1.0}), DivisionFloor);
}

TEST_CASE("solver failures name the time node")
{
    Grid g(2, 32);
    SolverOptions opt;
    opt.max_iter = 1;
    try {
        path_transport_field(ProbabilityPath::fisher_rao(fixture::source(g), fixture::target(g)), {0.0, 1.0}, opt);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(std::string(e.what()).find("t = 0") != std::string::npos);
    }
}
