#include "beckmann/density.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace beckmann {

Density::Density(ScalarField field) : field_(std::move(field)), kappa_(field_.min()), big_k_(field_.max())
{
    if (!(kappa_ > 0.0))
        throw std::invalid_argument("Density: values must be positive, min = " + std::to_string(kappa_));
    const double mass = integrate(field_);
    if (std::abs(mass - 1.0) > kMassTolerance)
        throw std::invalid_argument("Density: mass " + std::to_string(mass) + " differs from 1");
}

Density normalize(const ScalarField& f, double floor)
{
    if (!(floor > 0.0))
        throw std::invalid_argument("normalize: floor must be positive");
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) {
        if (!std::isfinite(x))
            throw std::invalid_argument("normalize: non-finite input");
        x = std::max(x, floor);
    }
    ScalarField clipped(f.grid(), std::move(v));
    clipped *= 1.0 / integrate(clipped);
    return Density(std::move(clipped));
}

Density gaussian_bump(const Grid& grid, std::span<const double> center, double sigma, double floor)
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian_bump: sigma must be positive");
    if (static_cast<int>(center.size()) != grid.dim())
        throw std::invalid_argument("gaussian_bump: center dimension mismatch");
    for (double c : center)
        if (c < 0.0 || c > 1.0)
            throw std::invalid_argument("gaussian_bump: center outside the unit box");
    const double inv = 1.0 / (2.0 * sigma * sigma);
    auto f = ScalarField::sample(grid, [&](const std::array<double, 2>& x) {
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double d = x[static_cast<std::size_t>(a)] - center[static_cast<std::size_t>(a)];
            r2 += d * d;
        }
        return std::exp(-r2 * inv);
    });
    return normalize(f, floor);
}

Density uniform_density(const Grid& grid) { return Density(ScalarField(grid, 1.0)); }

// ---------------------------------------------------------------- Hölder norms

std::vector<int> TensorSamples::shape() const
{
    std::vector<int> s;
    for (const auto& ax : axes)
        s.push_back(static_cast<int>(ax.size()));
    return s;
}

TensorSamples tensor_samples(const ScalarField& f)
{
    const Grid& g = f.grid();
    TensorSamples s;
    std::vector<double> coords(static_cast<std::size_t>(g.n()));
    for (int i = 0; i < g.n(); ++i)
        coords[static_cast<std::size_t>(i)] = g.coord(i);
    s.axes.assign(static_cast<std::size_t>(g.dim()), coords);
    s.values.assign(f.values().begin(), f.values().end());
    return s;
}

std::vector<double> tensor_derivative(const TensorSamples& samples, std::span<const int> beta)
{
    const auto shape = samples.shape();
    std::vector<double> cur = samples.values;
    std::vector<double> next(cur.size());
    for (std::size_t a = 0; a < beta.size(); ++a) {
        const auto& ax = samples.axes[a];
        for (int r = 0; r < beta[a]; ++r) {
            const double spacing = ax.size() > 1 ? ax[1] - ax[0] : 1.0;
            differentiate_axis(cur, shape, spacing, static_cast<int>(a), next);
            std::swap(cur, next);
        }
    }
    return cur;
}

namespace {

void enumerate_multi_indices(int dims, int order, std::vector<int>& cur, int axis, std::vector<std::vector<int>>& out)
{
    if (axis == dims) {
        int s = 0;
        for (int v : cur)
            s += v;
        if (s == order)
            out.push_back(cur);
        return;
    }
    for (int v = 0; v <= order; ++v) {
        cur[static_cast<std::size_t>(axis)] = v;
        enumerate_multi_indices(dims, order, cur, axis + 1, out);
    }
    cur[static_cast<std::size_t>(axis)] = 0;
}

std::vector<std::vector<int>> multi_indices(int dims, int order)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(dims), 0);
    enumerate_multi_indices(dims, order, cur, 0, out);
    return out;
}

}  // namespace

HolderEstimate holder_estimate(const TensorSamples& samples, int k, double alpha, std::size_t pair_budget,
                               std::uint64_t seed)
{
    if (k < 0 || k > 2)
        throw std::invalid_argument("holder_estimate: k must be in {0,1,2}");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("holder_estimate: alpha must lie in (0,1)");
    const std::size_t N = samples.size();
    if (pair_budget < N)
        throw std::invalid_argument("holder_estimate: pair budget smaller than the grid size");
    const int dims = static_cast<int>(samples.axes.size());
    const auto shape = samples.shape();

    HolderEstimate est;
    est.k = k;
    est.alpha = alpha;

    std::vector<std::vector<double>> top;  // derivatives of order exactly k
    for (int order = 0; order <= k; ++order) {
        for (const auto& beta : multi_indices(dims, order)) {
            auto d = tensor_derivative(samples, beta);
            for (double v : d)
                est.sup_part = std::max(est.sup_part, std::abs(v));
            if (order == k)
                top.push_back(std::move(d));
        }
    }

    // Node coordinates, row-major with axis 0 fastest.
    std::vector<double> pos(N * static_cast<std::size_t>(dims));
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    for (std::size_t p = 0; p < N; ++p) {
        for (int a = 0; a < dims; ++a)
            pos[p * static_cast<std::size_t>(dims) + static_cast<std::size_t>(a)] =
                samples.axes[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        for (int a = 0; a < dims; ++a) {
            if (++idx[static_cast<std::size_t>(a)] < shape[static_cast<std::size_t>(a)])
                break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }

    // Best quotient and the pair attaining it, per top-order derivative.
    std::vector<double> best(top.size(), 0.0);
    std::vector<std::pair<std::size_t, std::size_t>> arg(top.size(), {0, 0});
    auto distance_power = [&](std::size_t p, std::size_t q) {
        double r2 = 0.0;
        for (int a = 0; a < dims; ++a) {
            const double d = pos[p * static_cast<std::size_t>(dims) + static_cast<std::size_t>(a)] -
                             pos[q * static_cast<std::size_t>(dims) + static_cast<std::size_t>(a)];
            r2 += d * d;
        }
        return std::pow(r2, 0.5 * alpha);
    };
    auto visit = [&](std::size_t p, std::size_t q) {
        if (p == q)
            return;
        const double denom = distance_power(p, q);
        for (std::size_t t = 0; t < top.size(); ++t) {
            const double v = std::abs(top[t][p] - top[t][q]) / denom;
            if (v > best[t]) {
                best[t] = v;
                arg[t] = {p, q};
            }
        }
    };

    if (N * (N - 1) / 2 <= pair_budget) {
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q)
                visit(p, q);
    } else {
        // Neighbor pairs: every offset in {-1,0,1}^dims.
        std::vector<std::size_t> strides(static_cast<std::size_t>(dims), 1);
        for (int a = 1; a < dims; ++a)
            strides[static_cast<std::size_t>(a)] = strides[static_cast<std::size_t>(a - 1)] * static_cast<std::size_t>(shape[static_cast<std::size_t>(a - 1)]);
        int offsets = 1;
        for (int a = 0; a < dims; ++a)
            offsets *= 3;
        std::fill(idx.begin(), idx.end(), 0);
        for (std::size_t p = 0; p < N; ++p) {
            for (int code = 0; code < offsets; ++code) {
                int c = code;
                bool ok = true;
                std::ptrdiff_t q = static_cast<std::ptrdiff_t>(p);
                for (int a = 0; a < dims; ++a) {
                    const int off = c % 3 - 1;
                    c /= 3;
                    const int j = idx[static_cast<std::size_t>(a)] + off;
                    if (j < 0 || j >= shape[static_cast<std::size_t>(a)]) {
                        ok = false;
                        break;
                    }
                    q += off * static_cast<std::ptrdiff_t>(strides[static_cast<std::size_t>(a)]);
                }
                if (ok && static_cast<std::size_t>(q) > p)
                    visit(p, static_cast<std::size_t>(q));
            }
            for (int a = 0; a < dims; ++a) {
                if (++idx[static_cast<std::size_t>(a)] < shape[static_cast<std::size_t>(a)])
                    break;
                idx[static_cast<std::size_t>(a)] = 0;
            }
        }
        // Pairs through the extremal nodes of each top-order derivative.
        for (const auto& d : top) {
            const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
            const std::size_t plo = static_cast<std::size_t>(lo - d.begin());
            const std::size_t phi = static_cast<std::size_t>(hi - d.begin());
            for (std::size_t q = 0; q < N; ++q) {
                visit(plo, q);
                visit(phi, q);
            }
        }
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, N - 1);
        for (std::size_t r = 0; r < pair_budget; ++r) {
            const std::size_t p = pick(rng);
            const std::size_t q = pick(rng);
            visit(p, q);
        }
        // Alternating ascent: hold one end of the best pair and scan every
        // partner for the other, until the pair stops changing.
        for (std::size_t t = 0; t < top.size(); ++t) {
            const auto& d = top[t];
            for (int round = 0; round < 32; ++round) {
                const auto before = arg[t];
                for (int side = 0; side < 2; ++side) {
                    const std::size_t fixed = side == 0 ? arg[t].first : arg[t].second;
                    for (std::size_t q = 0; q < N; ++q) {
                        if (q == fixed)
                            continue;
                        const double v = std::abs(d[fixed] - d[q]) / distance_power(fixed, q);
                        if (v > best[t]) {
                            best[t] = v;
                            arg[t] = {fixed, q};
                        }
                    }
                }
                if (arg[t] == before)
                    break;
            }
        }
    }

    est.holder_part = best.empty() ? 0.0 : *std::max_element(best.begin(), best.end());
    est.norm = est.sup_part + est.holder_part;
    return est;
}

HolderEstimate holder_norm_estimate(const ScalarField& f, int k, double alpha, std::size_t pair_budget,
                                    std::uint64_t seed)
{
    return holder_estimate(tensor_samples(f), k, alpha, pair_budget, seed);
}

}  // namespace beckmann
