#include "doctest.h"

#include <cmath>

#include "beckmann/errors.hpp"
#include "beckmann/path.hpp"
#include "fixtures.hpp"

using namespace beckmann;

namespace {

bool bitwise_equal(const ScalarField& a, const ScalarField& b)
{
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] != b[k])
            return false;
    return true;
}

std::vector<ProbabilityPath> all_kinds(const Grid& g)
{
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto mid = 0.5 * nu.field() + 0.5 * mu.field();
    return {ProbabilityPath::linear(nu, mu), ProbabilityPath::fisher_rao(nu, mu),
            ProbabilityPath::tabulated({0.0, 0.5, 1.0}, {nu.field(), mid, mu.field()})};
}

}  // namespace

TEST_CASE("endpoints are returned bitwise")
{
    for (int d : {1, 2}) {
        Grid g(d, 32);
        for (const auto& p : all_kinds(g)) {
            CHECK(bitwise_equal(eval_path(p, 0.0).field(), fixture::source(g).field()));
            CHECK(bitwise_equal(eval_path(p, 1.0).field(), fixture::target(g).field()));
        }
    }
}

TEST_CASE("linear midpoint from a uniform source")
{
    Grid g(2, 16);
    auto p = ProbabilityPath::linear(uniform_density(g), fixture::target(g));
    auto mid = eval_path(p, 0.5);
    for (std::size_t k = 0; k < g.size(); ++k)
        CHECK(mid[k] == doctest::Approx((1 + fixture::target(g)[k]) / 2).epsilon(1e-15));
    CHECK_THROWS(eval_path(p, 1.5));
    CHECK_THROWS(eval_path(p, -0.1));
}

TEST_CASE("fisher-rao between equal densities is constant")
{
    Grid g(2, 16);
    auto nu = fixture::source(g);
    auto p = ProbabilityPath::fisher_rao(nu, nu);
    for (double t : {0.2, 0.5, 0.9}) {
        CHECK((eval_path(p, t).field() - nu.field()).max_abs() <= 1e-13);
        CHECK(fisher_rao_normalizer(p, t) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(path_derivative(p, t).rho_dot.max_abs() <= 1e-13);
    }
}

TEST_CASE("linear derivative is the density difference")
{
    Grid g(1, 64);
    auto p = all_kinds(g)[0];
    for (double t : {0.0, 0.3, 1.0}) {
        auto d = path_derivative(p, t);
        CHECK((d.rho_dot - (fixture::target(g).field() - fixture::source(g).field())).max_abs() == 0.0);
        CHECK(d.mass_defect <= 1e-12);
    }
}

TEST_CASE("analytic derivatives match a central difference in time")
{
    const double delta = 1e-4;
    for (int d : {1, 2}) {
        Grid g(d, 32);
        for (const auto& p : all_kinds(g))
            for (double t : {0.3, 0.7}) {
                auto fd = (1.0 / (2 * delta)) * (path_field(p, t + delta) - path_field(p, t - delta));
                CAPTURE(to_string(p.kind()));
                CHECK((path_derivative(p, t).rho_dot - fd).max_abs() <= 1e-6);
            }
    }
}

TEST_CASE("fisher-rao corrected derivative is mass free, the literal one is not")
{
    Grid g(2, 32);
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto corrected = ProbabilityPath::fisher_rao(nu, mu);
    auto literal = ProbabilityPath::fisher_rao(nu, mu, true);
    for (int k = 0; k <= 10; ++k) {
        const double t = k / 10.0;
        CHECK(path_derivative(corrected, t).mass_defect <= 1e-10);
        CHECK(fisher_rao_normalizer(corrected, t) <= 1 + 1e-10);
    }
    CHECK(path_derivative(literal, 0.2).mass_defect > 1e-3);
}

TEST_CASE("fisher-rao derivative bound")
{
    Grid g(2, 32);
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto p = ProbabilityPath::fisher_rao(nu, mu);
    const double kappa = std::min(nu.kappa(), mu.kappa());
    const double big_k = std::max(nu.bigK(), mu.bigK());
    const double log_ratio = std::log(big_k / kappa);
    for (int k = 0; k <= 10; ++k) {
        const double t = k / 10.0;
        const auto rho = path_field(p, t);
        // m_t is the rho_t-mean of log(mu/nu); recover it from the two formulas.
        const auto lit = path_derivative(ProbabilityPath::fisher_rao(nu, mu, true), t).rho_dot;
        const double m_t = integrate(lit);
        CHECK(std::abs(m_t) <= log_ratio);
        CHECK(path_derivative(p, t).rho_dot.max_abs() <= rho.max() * (log_ratio + std::abs(m_t)) + 1e-12);
    }
}

TEST_CASE("validate_path reports and bounds")
{
    Grid g(2, 32);
    auto nu = fixture::source(g), mu = fixture::target(g);
    std::vector<double> nodes;
    for (int k = 0; k <= 10; ++k)
        nodes.push_back(k / 10.0);

    auto lin = validate_path(ProbabilityPath::linear(nu, mu), nodes);
    CHECK(lin.nodes.size() == 11);
    CHECK(lin.kappa_path >= std::min(nu.kappa(), mu.kappa()) - 1e-15);

    auto fr_path = ProbabilityPath::fisher_rao(nu, mu);
    auto fr = validate_path(fr_path, nodes);
    CHECK(fr.kappa_path >= fr_path.kappa_path());
    CHECK(fr_path.kappa_path() == doctest::Approx(std::min(nu.kappa(), mu.kappa()) / std::max(nu.bigK(), mu.bigK())));
    CHECK(fr.max_derivative_defect <= 1e-10);
    CHECK(fr.max_mass_error <= 1e-12);
}

TEST_CASE("tabulated path with a negative slice is rejected")
{
    Grid g(1, 16);
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto bad = 0.5 * nu.field() + 0.5 * mu.field();
    bad[3] = -0.1;
    auto p = ProbabilityPath::tabulated({0.0, 0.5, 1.0}, {nu.field(), bad, mu.field()});
    CHECK_THROWS_AS(validate_path(p, {0.0, 0.25, 0.5, 1.0}), PathViolation);
    CHECK_THROWS_AS(eval_path(p, 0.5), PathViolation);
    CHECK_NOTHROW(validate_path(p, {0.0, 1.0}));

    CHECK_THROWS(ProbabilityPath::tabulated({0.0, 0.6, 0.5, 1.0}, {nu.field(), nu.field(), mu.field(), mu.field()}));
    CHECK_THROWS(ProbabilityPath::tabulated({0.1, 1.0}, {nu.field(), mu.field()}));
}

TEST_CASE("tabulated derivative is the slope of the table")
{
    Grid g(1, 16);
    auto nu = fixture::source(g), mu = fixture::target(g);
    auto lin = ProbabilityPath::linear(nu, mu);
    std::vector<double> ts{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<ScalarField> sl;
    for (double t : ts)
        sl.push_back(path_field(lin, t));
    auto tab = ProbabilityPath::tabulated(ts, sl);
    for (double t : {0.0, 0.1, 0.25, 0.6, 1.0})
        CHECK((path_derivative(tab, t).rho_dot - path_derivative(lin, t).rho_dot).max_abs() <= 1e-12);
}
