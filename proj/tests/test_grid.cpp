#include "doctest.h"

#include <cmath>
#include <numbers>

#include "beckmann/grid.hpp"
#include "oracles.hpp"

using namespace beckmann;
using std::numbers::pi;

TEST_CASE("grid rejects bad shapes")
{
    CHECK_THROWS(Grid(3, 16));
    CHECK_THROWS(Grid(1, 3));
    Grid g(2, 8);
    CHECK(g.size() == 64);
    CHECK(g.h() * g.n() == doctest::Approx(1.0));
    CHECK(g.coord(0) == doctest::Approx(1.0 / 16));
    const auto mi = g.multi_index(g.index(3, 5));
    CHECK(mi[0] == 3);
    CHECK(mi[1] == 5);
}

TEST_CASE("scalar fields reject non-finite values and wrong sizes")
{
    Grid g(1, 8);
    CHECK_THROWS(ScalarField(g, std::vector<double>(7, 0.0)));
    CHECK_THROWS(ScalarField(g, std::vector<double>(8, std::nan(""))));
    CHECK_THROWS(VectorField(std::vector<ScalarField>{ScalarField(g), ScalarField(g)}));
}

TEST_CASE("integrate")
{
    for (int d : {1, 2})
        CHECK(integrate(ScalarField(Grid(d, 16), 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    Grid g(1, 64);
    CHECK(std::abs(integrate(ScalarField::sample(g, [](auto x) { return x[0]; })) - 0.5) < 1e-15);
    CHECK(std::abs(integrate(ScalarField::sample(g, [](auto x) { return std::cos(pi * x[0]); }))) < 1e-12);

    Grid g2(2, 20);
    auto a = ScalarField::sample(g2, [](auto x) { return std::exp(x[0]) * x[1]; });
    auto b = ScalarField::sample(g2, [](auto x) { return std::sin(5 * x[0] + x[1]); });
    CHECK(integrate(2.5 * a + (-1.5) * b) == doctest::Approx(2.5 * integrate(a) - 1.5 * integrate(b)).epsilon(1e-14));
}

TEST_CASE("gradient of simple fields")
{
    Grid g(2, 16);
    CHECK(gradient(ScalarField(g, 3.0)).max_abs() == 0.0);

    Grid g1(1, 32);
    auto sq = ScalarField::sample(g1, [](auto x) { return x[0] * x[0]; });
    auto d = gradient(sq)[0];
    for (std::size_t k = 0; k < g1.size(); ++k)  // second-order stencils are exact on quadratics
        CHECK(d[k] == doctest::Approx(2 * g1.coord(static_cast<int>(k))).epsilon(1e-12));
}

TEST_CASE("gradient and divergence converge at second order")
{
    std::vector<double> hs, eg, ed, erot;
    for (int n : {32, 64, 128}) {
        Grid g(2, n);
        auto f = ScalarField::sample(g, [](auto x) { return std::sin(pi * x[0]) * std::cos(pi * x[1]); });
        auto gx = ScalarField::sample(g, [](auto x) { return pi * std::cos(pi * x[0]) * std::cos(pi * x[1]); });
        auto gy = ScalarField::sample(g, [](auto x) { return -pi * std::sin(pi * x[0]) * std::sin(pi * x[1]); });
        auto grad = gradient(f);
        hs.push_back(g.h());
        eg.push_back(std::max((grad[0] - gx).max_abs(), (grad[1] - gy).max_abs()));

        // A nonlinear field keeps the divergence error away from rounding.
        VectorField v({ScalarField::sample(g, [](auto x) { return std::sin(2 * x[0]) * x[1]; }),
                       ScalarField::sample(g, [](auto x) { return std::exp(x[1]) * x[0]; })});
        auto exact = ScalarField::sample(g, [](auto x) { return 2 * std::cos(2 * x[0]) * x[1] + std::exp(x[1]) * x[0]; });
        ed.push_back((divergence(v) - exact).max_abs());

        VectorField lin({ScalarField::sample(g, [](auto x) { return x[0]; }), ScalarField::sample(g, [](auto x) { return x[1]; })});
        CHECK((divergence(lin) - ScalarField(g, 2.0)).max_abs() < 1e-10);
        VectorField rot({ScalarField::sample(g, [](auto x) { return -x[1]; }), ScalarField::sample(g, [](auto x) { return x[0]; })});
        CHECK(divergence(rot).max_abs() < 1e-10);
        CHECK(divergence(VectorField(g)).max_abs() == 0.0);
    }
    CHECK(oracle::loglog_slope(hs, eg) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(oracle::loglog_slope(hs, ed) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("discrete integration by parts for fields with zero normal trace")
{
    double prev = 1e300;
    for (int n : {32, 64, 128}) {
        Grid g(2, n);
        VectorField v({ScalarField::sample(g, [](auto x) { return std::sin(pi * x[0]) * std::cos(pi * x[1]); }),
                       ScalarField::sample(g, [](auto x) { return std::sin(pi * x[1]) * std::cos(2 * x[0]); })});
        auto u = ScalarField::sample(g, [](auto x) { return std::cos(pi * x[0]) + x[0] * x[1]; });
        auto gu = gradient(u);
        const double defect = std::abs(integrate(hadamard(divergence(v), u)) +
                                       integrate(hadamard(v[0], gu[0]) + hadamard(v[1], gu[1])));
        CHECK(defect <= 1.0 * g.h());
        CHECK(defect < prev);
        prev = defect;
    }
}

TEST_CASE("wall extrapolation and boundary flux")
{
    Grid g(1, 16);
    auto f = ScalarField::sample(g, [](auto x) { return 1 + 2 * x[0] - x[0] * x[0]; });
    CHECK(wall_values(f, 0, 0)[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(wall_values(f, 0, 1)[0] == doctest::Approx(2.0).epsilon(1e-13));
    VectorField w({f});
    CHECK(boundary_normal_flux(w) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("neumann laplacian kills constants and is symmetric under reflection")
{
    Grid g(2, 12);
    CHECK(neumann_laplacian(ScalarField(g, 4.0)).max_abs() < 1e-12);
    auto u = ScalarField::sample(g, [](auto x) { return std::cos(3 * x[0]) * (x[1] - 0.5) * (x[1] - 0.5); });
    auto lap = neumann_laplacian(u);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i)
            if (i == 0 || j == 0 || i == g.n() - 1 || j == g.n() - 1)
                continue;
            else {
                const double fd = (u[g.index(i + 1, j)] + u[g.index(i - 1, j)] + u[g.index(i, j + 1)] +
                                   u[g.index(i, j - 1)] - 4 * u[g.index(i, j)]) / (g.h() * g.h());
                CHECK(lap[g.index(i, j)] == doctest::Approx(fd).epsilon(1e-12));
            }
}
