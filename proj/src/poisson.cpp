#include "beckmann/poisson.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <vector>

#include "beckmann/errors.hpp"

namespace beckmann {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += a[k] * b[k];
    return s;
}

double max_abs(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

std::string sci(double v)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

void project_mean_zero(std::span<double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    const double mean = s / static_cast<double>(v.size());
    for (double& x : v)
        x -= mean;
}

bool check_compatibility(const ScalarField& f, double tol) { return std::abs(integrate(f)) <= tol; }

Potential solve_neumann(const NeumannProblem& problem, const SolverOptions& options)
{
    const Grid& g = problem.grid();
    const std::size_t N = g.size();
    const double mass = integrate(problem.f);

    Potential out{ScalarField(g), 0.0, 0, 0.0};
    std::vector<double> b(problem.f.values().begin(), problem.f.values().end());
    if (std::abs(mass) > options.compat_tol) {
        if (options.correct_small_mean && std::abs(mass) < kMeanCorrectionLimit) {
            std::cerr << "warning [poisson]: right-hand side has integral " << sci(mass)
                      << "; subtracting its mean\n";
            out.mean_correction = mass;
        } else {
            throw CompatibilityViolated("|integral of f| = " + sci(std::abs(mass)) + " exceeds " +
                                        sci(options.compat_tol));
        }
    }
    project_mean_zero(b);

    const double f_scale = max_abs(b);
    if (f_scale == 0.0)
        return out;

    const long max_iter = options.max_iter > 0 ? options.max_iter : 20L * static_cast<long>(N);
    const double tol = options.cg_tol * f_scale;

    // Solve (-Lap) u = -f; -Lap is positive semidefinite with the constants as kernel.
    std::vector<double> u(N, 0.0), r(N), p(N), Ap(N);
    for (std::size_t k = 0; k < N; ++k)
        r[k] = -b[k];
    p = r;
    double rr = dot(r, r);
    long it = 0;
    double rinf = max_abs(r);
    while (rinf > tol && it < max_iter) {
        apply_neumann_laplacian(g, p, Ap);
        for (double& v : Ap)
            v = -v;
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0))
            break;
        const double step = rr / pAp;
        for (std::size_t k = 0; k < N; ++k) {
            u[k] += step * p[k];
            r[k] -= step * Ap[k];
        }
        project_mean_zero(u);
        project_mean_zero(r);
        ++it;
        rinf = max_abs(r);
        const double rr_next = dot(r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t k = 0; k < N; ++k)
            p[k] = r[k] + beta * p[k];
    }

    project_mean_zero(u);
    out.u = ScalarField(g, std::move(u));
    out.iterations = it;
    ScalarField rhs(g, std::move(b));
    out.residual_inf = solve_residual(out.u, rhs);
    if (rinf > tol) {
        throw NonConvergence("residual " + sci(out.residual_inf) + " above " + sci(tol) + " after " +
                             std::to_string(it) + " iterations");
    }
    return out;
}

double solve_residual(const ScalarField& u, const ScalarField& f)
{
    if (!(u.grid() == f.grid()))
        throw std::invalid_argument("solve_residual: grid mismatch");
    return (neumann_laplacian(u) - f).max_abs();
}

double solve_residual(const Potential& u, const ScalarField& f) { return solve_residual(u.u, f); }

}  // namespace beckmann
