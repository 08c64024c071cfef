#include "beckmann/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "beckmann/errors.hpp"
#include "beckmann/parallel.hpp"

namespace beckmann {

namespace {

std::string describe(const Theta& th, int q)
{
    std::ostringstream os;
    os << "theta = (" << th[0];
    if (q == 2)
        os << ", " << th[1];
    os << ")";
    return os.str();
}

double theta_distance(const Theta& a, const Theta& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

std::vector<Theta> tensor_nodes(const std::vector<std::vector<double>>& axes)
{
    if (axes.empty() || axes.size() > 2)
        throw std::invalid_argument("parametric: need 1 or 2 theta axes");
    std::vector<Theta> nodes;
    if (axes.size() == 1) {
        for (double t : axes[0])
            nodes.push_back({t, 0.0});
    } else {
        for (double t1 : axes[1])
            for (double t0 : axes[0])
                nodes.push_back({t0, t1});
    }
    return nodes;
}

void check_uniform_axes(const std::vector<std::vector<double>>& axes)
{
    for (const auto& ax : axes) {
        if (ax.size() < 2)
            throw std::invalid_argument("parametric: theta axes need at least 2 nodes");
        const double h = ax[1] - ax[0];
        for (std::size_t i = 1; i < ax.size(); ++i)
            if (!(std::abs(ax[i] - ax[i - 1] - h) <= 1e-12 * std::max(1.0, std::abs(h)) && h > 0.0))
                throw std::invalid_argument("parametric: theta axes must be uniform and increasing");
    }
}

}  // namespace

ParametricFamily::ParametricFamily(int q, std::vector<Theta> theta_nodes, Density rho_nu, const Target& rho_mu_of)
    : q_(q), nodes_(std::move(theta_nodes)), rho_nu_(std::move(rho_nu))
{
    if (q_ != 1 && q_ != 2)
        throw std::invalid_argument("parametric family: q must be 1 or 2");
    if (nodes_.empty())
        throw std::invalid_argument("parametric family: no theta nodes");
    for (const auto& th : nodes_)
        for (int a = 0; a < 2; ++a) {
            const double c = th[static_cast<std::size_t>(a)];
            if (a < q_ ? !(c > 0.0 && c < 1.0) : c != 0.0)
                throw std::invalid_argument("parametric family: node " + describe(th, q_) + " outside Theta");
        }
    targets_.reserve(nodes_.size());
    for (const auto& th : nodes_) {
        targets_.push_back(rho_mu_of(th));
        if (!(targets_.back().grid() == rho_nu_.grid()))
            throw std::invalid_argument("parametric family: target at " + describe(th, q_) + " on a different grid");
    }
}

ParametricFamily ParametricFamily::on_tensor(std::vector<std::vector<double>> theta_axes, Density rho_nu,
                                             const Target& rho_mu_of)
{
    check_uniform_axes(theta_axes);
    ParametricFamily f(static_cast<int>(theta_axes.size()), tensor_nodes(theta_axes), std::move(rho_nu), rho_mu_of);
    f.axes_ = std::move(theta_axes);
    return f;
}

ScalarField ParametricFamily::rhs(std::size_t i) const { return targets_.at(i).field() - rho_nu_.field(); }

std::vector<double> theta_axis(int m)
{
    if (m < 1)
        throw std::invalid_argument("theta_axis: need at least one node");
    std::vector<double> t(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        t[static_cast<std::size_t>(i)] = (i + 0.5) / m;
    return t;
}

ParametricFamily shifting_bump_family(const Grid& grid, int nodes)
{
    const double sigma = 0.3;
    std::array<double, 2> center{0.5, 0.5};
    auto nu = gaussian_bump(grid, std::span<const double>(center.data(), static_cast<std::size_t>(grid.dim())), sigma);
    auto target = [&grid, sigma](const Theta& th) {
        std::array<double, 2> c{0.3 + 0.4 * th[0], 0.4 + 0.2 * th[0]};
        return gaussian_bump(grid, std::span<const double>(c.data(), static_cast<std::size_t>(grid.dim())), sigma);
    };
    return ParametricFamily::on_tensor({theta_axis(nodes)}, std::move(nu), target);
}

ParametricFamily scaling_family(const Density& rho_nu, const Density& rho_mu1, int nodes)
{
    auto target = [&](const Theta& th) {
        return Density((1.0 - th[0]) * rho_nu.field() + th[0] * rho_mu1.field());
    };
    return ParametricFamily::on_tensor({theta_axis(nodes)}, rho_nu, target);
}

std::vector<Potential> solve_family(const ParametricFamily& family, const SolverOptions& options)
{
    std::vector<Potential> out(family.size(), Potential{ScalarField(family.grid())});
    parallel_for(family.size(), [&](std::size_t i) {
        try {
            out[i] = solve_neumann(NeumannProblem(family.rhs(i)), options);
        } catch (NumericalError& e) {
            e.add_context(describe(family.theta_nodes()[i], family.q()));
            throw;
        }
    });
    return out;
}

StabilityReport stability_ratios(const ParametricFamily& family, const std::vector<Potential>& solutions, int k,
                                 double alpha, double beta)
{
    if (family.size() < 2)
        throw std::invalid_argument("stability_ratios: need at least 2 nodes");
    if (solutions.size() != family.size())
        throw std::invalid_argument("stability_ratios: one solution per node required");
    if (k < 0)
        throw std::invalid_argument("stability_ratios: k must be >= 0");
    StabilityReport rep;
    rep.beta = beta;
    rep.alpha = alpha;
    rep.num_order = std::min(k + 2, 2);
    rep.den_order = rep.num_order - 2;

    std::vector<StabilityPair> all;
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = i + 1; j < family.size(); ++j)
            all.push_back({i, j});
    parallel_for(all.size(), [&](std::size_t p) {
        auto& pr = all[p];
        pr.den = holder_norm_estimate(family.rhs(pr.i) - family.rhs(pr.j), rep.den_order, alpha).norm;
        if (pr.den < kStabilityFloor)
            return;
        pr.num = holder_norm_estimate(solutions[pr.i].u - solutions[pr.j].u, rep.num_order, alpha).norm;
        pr.ratio = pr.num / pr.den;
    });
    for (const auto& pr : all) {
        if (pr.den < kStabilityFloor) {
            ++rep.skipped;
            continue;
        }
        rep.pairs.push_back(pr);
        rep.max_ratio = std::max(rep.max_ratio.value_or(pr.ratio), pr.ratio);
    }
    return rep;
}

Theta ThetaField::node(std::size_t s) const
{
    if (q() == 1)
        return {theta_axes[0].at(s), 0.0};
    const std::size_t m0 = theta_axes[0].size();
    return {theta_axes[0].at(s % m0), theta_axes[1].at(s / m0)};
}

ThetaField family_rhs_field(const ParametricFamily& family)
{
    if (family.theta_axes().empty())
        throw std::invalid_argument("family_rhs_field: family is not on a tensor theta grid");
    ThetaField tf{family.theta_axes(), {}};
    for (std::size_t i = 0; i < family.size(); ++i)
        tf.slices.push_back(family.rhs(i));
    return tf;
}

ThetaField family_potential_field(const ParametricFamily& family, const std::vector<Potential>& solutions)
{
    if (family.theta_axes().empty())
        throw std::invalid_argument("family_potential_field: family is not on a tensor theta grid");
    if (solutions.size() != family.size())
        throw std::invalid_argument("family_potential_field: one solution per node required");
    ThetaField tf{family.theta_axes(), {}};
    for (const auto& s : solutions)
        tf.slices.push_back(s.u);
    return tf;
}

TensorSamples joint_samples(const ThetaField& field)
{
    if (field.q() < 1 || field.q() > 2)
        throw std::invalid_argument("joint_samples: need 1 or 2 theta axes");
    std::size_t count = 1;
    for (const auto& ax : field.theta_axes)
        count *= ax.size();
    if (field.slices.size() != count)
        throw std::invalid_argument("joint_samples: one slice per theta node required");
    check_uniform_axes(field.theta_axes);
    const Grid& g = field.slices.front().grid();
    TensorSamples s = tensor_samples(field.slices.front());
    for (const auto& ax : field.theta_axes)
        s.axes.push_back(ax);
    s.values.clear();
    s.values.reserve(count * g.size());
    for (const auto& sl : field.slices) {
        if (!(sl.grid() == g))
            throw std::invalid_argument("joint_samples: slices on different grids");
        s.values.insert(s.values.end(), sl.values().begin(), sl.values().end());
    }
    return s;
}

HolderEstimate joint_holder_estimate(const ThetaField& field, int k, double alpha, std::size_t pair_budget,
                                     std::uint64_t seed)
{
    return holder_estimate(joint_samples(field), k, alpha, pair_budget, seed);
}

BanachHolderEstimate banach_holder_estimate(const ThetaField& field, int l, int k, double alpha, double beta,
                                            std::size_t pair_budget, std::uint64_t seed)
{
    if (l != 0 && l != 1)
        throw std::invalid_argument("banach_holder_estimate: l must be 0 or 1");
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("banach_holder_estimate: beta must lie in (0,1]");
    const TensorSamples joint = joint_samples(field);
    const Grid& g = field.slices.front().grid();
    const std::size_t S = field.slices.size();
    const int dims = static_cast<int>(joint.axes.size());

    // D^m f as slices, m over theta multi-indices with |m| <= l.
    auto theta_derivative = [&](int axis) {
        std::vector<int> beta_idx(static_cast<std::size_t>(dims), 0);
        beta_idx[static_cast<std::size_t>(g.dim() + axis)] = 1;
        const auto v = tensor_derivative(joint, beta_idx);
        std::vector<ScalarField> out;
        for (std::size_t s = 0; s < S; ++s)
            out.emplace_back(g, std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(s * g.size()),
                                                    v.begin() + static_cast<std::ptrdiff_t>((s + 1) * g.size())));
        return out;
    };
    std::vector<std::vector<ScalarField>> orders{field.slices};
    std::vector<std::vector<ScalarField>> top;
    if (l == 0) {
        top.push_back(field.slices);
    } else {
        for (int a = 0; a < field.q(); ++a) {
            orders.push_back(theta_derivative(a));
            top.push_back(orders.back());
        }
    }

    BanachHolderEstimate est{l, k, alpha, beta};
    for (const auto& fam : orders) {
        std::vector<double> norms(S);
        parallel_for(S, [&](std::size_t s) { norms[s] = holder_norm_estimate(fam[s], k, alpha, pair_budget, seed).norm; });
        est.sup_part = std::max(est.sup_part, *std::max_element(norms.begin(), norms.end()));
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = i + 1; j < S; ++j)
            pairs.emplace_back(i, j);
    for (const auto& fam : top) {
        std::vector<double> q(pairs.size());
        parallel_for(pairs.size(), [&](std::size_t p) {
            const auto [i, j] = pairs[p];
            const double diff = holder_norm_estimate(fam[i] - fam[j], k, alpha, pair_budget, seed).norm;
            q[p] = diff / std::pow(theta_distance(field.node(i), field.node(j)), beta);
        });
        if (!q.empty())
            est.holder_part = std::max(est.holder_part, *std::max_element(q.begin(), q.end()));
    }
    est.norm = est.sup_part + est.holder_part;
    return est;
}

double joint_inclusion_constant(int d, double alpha)
{
    if (d != 1 && d != 2)
        throw std::invalid_argument("joint_inclusion_constant: d must be 1 or 2");
    const double diam = std::sqrt(static_cast<double>(d));
    return (2.0 + diam) * std::pow(diam, 1.0 - alpha);
}

}  // namespace beckmann
