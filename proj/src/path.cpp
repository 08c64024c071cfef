#include "beckmann/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "beckmann/errors.hpp"

namespace beckmann {

std::string_view to_string(PathKind kind)
{
    switch (kind) {
    case PathKind::Linear: return "linear";
    case PathKind::FisherRao: return "fisher-rao";
    case PathKind::Tabulated: return "tabulated";
    }
    return "unknown";
}

namespace {

void check_time(double t)
{
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("path: t = " + std::to_string(t) + " outside [0,1]");
}

void check_same_grid(const Density& a, const Density& b)
{
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("path: endpoint densities live on different grids");
}

std::string fmt_t(double t)
{
    std::ostringstream os;
    os << t;
    return os.str();
}

// Interval of the table containing t and the weight of its right end.
std::pair<std::size_t, double> locate(const std::vector<double>& ts, double t)
{
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t j = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
    j = std::min(j, ts.size() - 2);
    return {j, (t - ts[j]) / (ts[j + 1] - ts[j])};
}

ScalarField log_ratio(const ProbabilityPath& p)
{
    const auto nu = p.rho_nu().field().values();
    const auto mu = p.rho_mu().field().values();
    std::vector<double> v(nu.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = std::log(mu[k] / nu[k]);
    return ScalarField(p.grid(), std::move(v));
}

ScalarField geometric_mean(const ProbabilityPath& p, double t)
{
    const auto nu = p.rho_nu().field().values();
    const auto mu = p.rho_mu().field().values();
    std::vector<double> v(nu.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = std::exp((1.0 - t) * std::log(nu[k]) + t * std::log(mu[k]));
    return ScalarField(p.grid(), std::move(v));
}

}  // namespace

ProbabilityPath::ProbabilityPath(PathKind kind, Density nu, Density mu)
    : kind_(kind), rho_nu_(std::move(nu)), rho_mu_(std::move(mu))
{
    check_same_grid(rho_nu_, rho_mu_);
}

ProbabilityPath ProbabilityPath::linear(Density rho_nu, Density rho_mu)
{
    ProbabilityPath p(PathKind::Linear, std::move(rho_nu), std::move(rho_mu));
    p.kappa_path_ = std::min(p.rho_nu_.kappa(), p.rho_mu_.kappa());
    return p;
}

ProbabilityPath ProbabilityPath::fisher_rao(Density rho_nu, Density rho_mu, bool literal_derivative)
{
    ProbabilityPath p(PathKind::FisherRao, std::move(rho_nu), std::move(rho_mu));
    p.literal_ = literal_derivative;
    const double kappa = std::min(p.rho_nu_.kappa(), p.rho_mu_.kappa());
    const double big_k = std::max(p.rho_nu_.bigK(), p.rho_mu_.bigK());
    p.kappa_path_ = kappa / big_k;  // |Omega| = 1 for the unit box
    return p;
}

ProbabilityPath ProbabilityPath::tabulated(std::vector<double> t_nodes, std::vector<ScalarField> slices)
{
    if (t_nodes.size() < 2 || t_nodes.size() != slices.size())
        throw std::invalid_argument("tabulated path: need >= 2 nodes and one slice per node");
    if (t_nodes.front() != 0.0 || t_nodes.back() != 1.0)
        throw std::invalid_argument("tabulated path: nodes must start at 0 and end at 1");
    for (std::size_t j = 1; j < t_nodes.size(); ++j)
        if (!(t_nodes[j] > t_nodes[j - 1]))
            throw std::invalid_argument("tabulated path: nodes must increase strictly");
    for (const auto& s : slices)
        if (!(s.grid() == slices.front().grid()))
            throw std::invalid_argument("tabulated path: slices on different grids");
    ProbabilityPath p(PathKind::Tabulated, Density(slices.front()), Density(slices.back()));
    p.kappa_path_ = slices.front().min();
    for (const auto& s : slices)
        p.kappa_path_ = std::min(p.kappa_path_, s.min());
    p.table_t_ = std::move(t_nodes);
    p.table_ = std::move(slices);
    return p;
}

ScalarField path_field(const ProbabilityPath& p, double t)
{
    check_time(t);
    if (t == 0.0)
        return p.rho_nu().field();
    if (t == 1.0)
        return p.rho_mu().field();
    switch (p.kind()) {
    case PathKind::Linear:
        return (1.0 - t) * p.rho_nu().field() + t * p.rho_mu().field();
    case PathKind::FisherRao: {
        auto g = geometric_mean(p, t);
        g *= 1.0 / integrate(g);
        return g;
    }
    case PathKind::Tabulated: {
        const auto [j, lam] = locate(p.table_times(), t);
        return (1.0 - lam) * p.table_slices()[j] + lam * p.table_slices()[j + 1];
    }
    }
    throw std::logic_error("path_field: unknown kind");
}

Density eval_path(const ProbabilityPath& p, double t)
{
    if (t == 0.0)
        return p.rho_nu();
    if (t == 1.0)
        return p.rho_mu();
    auto f = path_field(p, t);
    if (p.kind() != PathKind::Tabulated)
        return Density(std::move(f));
    const double mass = integrate(f);
    if (!(f.min() > 0.0) || std::abs(mass - 1.0) > kPathMassTolerance)
        throw PathViolation("slice at t = " + fmt_t(t) + " is not a density (min " + std::to_string(f.min()) +
                            ", mass " + std::to_string(mass) + ")");
    f *= 1.0 / mass;
    return Density(std::move(f));
}

double fisher_rao_normalizer(const ProbabilityPath& p, double t)
{
    check_time(t);
    if (p.kind() != PathKind::FisherRao)
        throw std::invalid_argument("fisher_rao_normalizer: path is not Fisher-Rao");
    return integrate(geometric_mean(p, t));
}

PathDerivative path_derivative(const ProbabilityPath& p, double t)
{
    check_time(t);
    PathDerivative d{t, ScalarField(p.grid()), 0.0};
    switch (p.kind()) {
    case PathKind::Linear:
        d.rho_dot = p.rho_mu().field() - p.rho_nu().field();
        break;
    case PathKind::FisherRao: {
        const auto L = log_ratio(p);
        const auto rho = path_field(p, t);
        d.rho_dot = hadamard(rho, L);
        if (!p.literal_derivative())
            d.rho_dot -= integrate(d.rho_dot) * rho;
        break;
    }
    case PathKind::Tabulated: {
        const auto& ts = p.table_times();
        const auto& sl = p.table_slices();
        auto slope = [&](std::size_t j) { return (1.0 / (ts[j + 1] - ts[j])) * (sl[j + 1] - sl[j]); };
        const auto [j, lam] = locate(ts, t);
        if (lam == 0.0 && j > 0)
            d.rho_dot = 0.5 * (slope(j - 1) + slope(j));
        else if (lam == 1.0 && j + 2 < ts.size())
            d.rho_dot = 0.5 * (slope(j) + slope(j + 1));
        else
            d.rho_dot = slope(j);
        break;
    }
    }
    d.mass_defect = std::abs(integrate(d.rho_dot));
    return d;
}

PathReport validate_path(const ProbabilityPath& p, const std::vector<double>& t_nodes)
{
    PathReport rep;
    rep.kappa_path = std::numeric_limits<double>::infinity();
    for (double t : t_nodes) {
        check_time(t);
        const auto f = path_field(p, t);
        PathNodeReport node{t, integrate(f), f.min(), f.max(), path_derivative(p, t).mass_defect};
        if (!(node.min_value > 0.0))
            throw PathViolation("rho_t at t = " + fmt_t(t) + " has min " + std::to_string(node.min_value));
        if (std::abs(node.mass - 1.0) > kPathMassTolerance)
            throw PathViolation("rho_t at t = " + fmt_t(t) + " has mass " + std::to_string(node.mass));
        rep.kappa_path = std::min(rep.kappa_path, node.min_value);
        rep.max_mass_error = std::max(rep.max_mass_error, std::abs(node.mass - 1.0));
        rep.max_derivative_defect = std::max(rep.max_derivative_defect, node.derivative_mass_defect);
        rep.nodes.push_back(node);
    }
    return rep;
}

}  // namespace beckmann
