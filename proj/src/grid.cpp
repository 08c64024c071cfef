#include "beckmann/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace beckmann {

Grid::Grid(int dim, int n) : dim_(dim), n_(n), h_(1.0 / n), size_(0)
{
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("Grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (n < 4)
        throw std::invalid_argument("Grid: need at least 4 points per axis, got " + std::to_string(n));
    size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
}

std::array<int, 2> Grid::multi_index(std::size_t k) const
{
    if (dim_ == 1)
        return {static_cast<int>(k), 0};
    return {static_cast<int>(k % n_), static_cast<int>(k / n_)};
}

std::array<double, 2> Grid::node(std::size_t k) const
{
    auto ij = multi_index(k);
    if (dim_ == 1)
        return {coord(ij[0]), 0.0};
    return {coord(ij[0]), coord(ij[1])};
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.size(), fill)
{
    if (!std::isfinite(fill))
        throw std::invalid_argument("ScalarField: non-finite fill value");
}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid.size())
        throw std::invalid_argument("ScalarField: value count " + std::to_string(values_.size()) +
                                    " does not match grid size " + std::to_string(grid.size()));
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("ScalarField: non-finite value");
}

double ScalarField::max_abs() const
{
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

static void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (!(a == b))
        throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

ScalarField& ScalarField::operator+=(const ScalarField& o)
{
    require_same_grid(grid_, o.grid_, "ScalarField::operator+=");
    for (std::size_t k = 0; k < values_.size(); ++k)
        values_[k] += o.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o)
{
    require_same_grid(grid_, o.grid_, "ScalarField::operator-=");
    for (std::size_t k = 0; k < values_.size(); ++k)
        values_[k] -= o.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double c)
{
    for (double& v : values_)
        v *= c;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b)
{
    require_same_grid(a.grid(), b.grid(), "hadamard");
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < a.size(); ++k)
        out[k] = a[k] * b[k];
    return out;
}

// ---------------------------------------------------------------- VectorField

VectorField::VectorField(const Grid& grid) : grid_(grid), components_(static_cast<std::size_t>(grid.dim()), ScalarField(grid)) {}

VectorField::VectorField(std::vector<ScalarField> components)
    : grid_(components.empty() ? throw std::invalid_argument("VectorField: no components") : components.front().grid()),
      components_(std::move(components))
{
    if (static_cast<int>(components_.size()) != grid_.dim())
        throw std::invalid_argument("VectorField: component count must equal grid dimension");
    for (const auto& c : components_)
        require_same_grid(grid_, c.grid(), "VectorField");
}

double VectorField::max_abs() const
{
    double m = 0.0;
    for (const auto& c : components_)
        m = std::max(m, c.max_abs());
    return m;
}

ScalarField VectorField::norm_squared() const
{
    ScalarField out(grid_);
    for (const auto& c : components_)
        for (std::size_t k = 0; k < c.size(); ++k)
            out[k] += c[k] * c[k];
    return out;
}

VectorField& VectorField::operator+=(const VectorField& o)
{
    require_same_grid(grid_, o.grid_, "VectorField::operator+=");
    for (std::size_t a = 0; a < components_.size(); ++a)
        components_[a] += o.components_[a];
    return *this;
}

VectorField& VectorField::operator*=(double c)
{
    for (auto& comp : components_)
        comp *= c;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a += (-1.0) * b; }
VectorField operator*(double c, VectorField a) { return a *= c; }

// ---------------------------------------------------------------- calculus

double integrate(const ScalarField& f)
{
    double sum = 0.0;
    for (double v : f.values())
        sum += v;
    return sum * std::pow(f.grid().h(), f.grid().dim());
}

void differentiate_axis(std::span<const double> values, std::span<const int> shape, double spacing, int axis,
                        std::span<double> out)
{
    const int len = shape[static_cast<std::size_t>(axis)];
    if (len < 4)
        throw std::invalid_argument("differentiate_axis: need at least 4 nodes along the axis");
    std::size_t stride = 1;
    for (int a = 0; a < axis; ++a)
        stride *= static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]);
    const std::size_t block = stride * static_cast<std::size_t>(len);
    const std::size_t total = values.size();
    const double c = 1.0 / (2.0 * spacing);

    for (std::size_t base = 0; base < total; base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            const std::size_t s = base + off;
            auto at = [&](int i) { return values[s + stride * static_cast<std::size_t>(i)]; };
            // The end stencils carry the same leading error h^2 f'''/6 as the
            // centered one, so the error stays smooth and a second
            // differentiation keeps second order up to the wall.
            out[s] = (-4.0 * at(0) + 7.0 * at(1) - 4.0 * at(2) + at(3)) * c;
            for (int i = 1; i < len - 1; ++i)
                out[s + stride * static_cast<std::size_t>(i)] = (at(i + 1) - at(i - 1)) * c;
            out[s + stride * static_cast<std::size_t>(len - 1)] = (4.0 * at(len - 1) - 7.0 * at(len - 2) + 4.0 * at(len - 3) - at(len - 4)) * c;
        }
    }
}

ScalarField partial(const ScalarField& f, int axis)
{
    const Grid& g = f.grid();
    if (axis < 0 || axis >= g.dim())
        throw std::invalid_argument("partial: axis out of range");
    std::vector<int> shape(static_cast<std::size_t>(g.dim()), g.n());
    std::vector<double> out(g.size());
    differentiate_axis(f.values(), shape, g.h(), axis, out);
    return ScalarField(g, std::move(out));
}

VectorField gradient(const ScalarField& f)
{
    return gradient(f, f.grid().dim());
}

VectorField gradient(const ScalarField& f, int axis_count)
{
    std::vector<ScalarField> comps;
    for (int a = 0; a < axis_count; ++a)
        comps.push_back(partial(f, a));
    return VectorField(std::move(comps));
}

ScalarField divergence(const VectorField& v)
{
    ScalarField out(v.grid());
    for (int a = 0; a < v.dim(); ++a)
        out += partial(v[a], a);
    return out;
}

std::vector<double> wall_values(const ScalarField& f, int axis, int side)
{
    const Grid& g = f.grid();
    const int n = g.n();
    const std::size_t stride = g.stride(axis);
    const std::size_t other = g.stride(1 - axis);
    const int count = g.dim() == 1 ? 1 : n;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int m = 0; m < count; ++m) {
        const std::size_t base = g.dim() == 1 ? 0 : other * static_cast<std::size_t>(m);
        std::size_t i0, i1, i2;
        if (side == 0) {
            i0 = base;
            i1 = base + stride;
            i2 = base + 2 * stride;
        } else {
            i0 = base + stride * static_cast<std::size_t>(n - 1);
            i1 = base + stride * static_cast<std::size_t>(n - 2);
            i2 = base + stride * static_cast<std::size_t>(n - 3);
        }
        // Lagrange weights from nodes at h/2, 3h/2, 5h/2 to the wall.
        out[static_cast<std::size_t>(m)] = (15.0 * f[i0] - 10.0 * f[i1] + 3.0 * f[i2]) / 8.0;
    }
    return out;
}

double boundary_normal_flux(const VectorField& w)
{
    double m = 0.0;
    for (int a = 0; a < w.dim(); ++a)
        for (int side = 0; side < 2; ++side)
            for (double v : wall_values(w[a], a, side))
                m = std::max(m, std::abs(v));
    return m;
}

void apply_neumann_laplacian(const Grid& g, std::span<const double> u, std::span<double> out)
{
    const int n = g.n();
    const double inv_h2 = 1.0 / (g.h() * g.h());
    if (g.dim() == 1) {
        out[0] = (u[1] - u[0]) * inv_h2;
        for (int i = 1; i < n - 1; ++i)
            out[static_cast<std::size_t>(i)] = (u[static_cast<std::size_t>(i + 1)] - 2.0 * u[static_cast<std::size_t>(i)] +
                                                u[static_cast<std::size_t>(i - 1)]) * inv_h2;
        out[static_cast<std::size_t>(n - 1)] = (u[static_cast<std::size_t>(n - 2)] - u[static_cast<std::size_t>(n - 1)]) * inv_h2;
        return;
    }
    const std::size_t N = static_cast<std::size_t>(n);
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t i = 0; i < N; ++i) {
            const std::size_t k = i + N * j;
            const double c = u[k];
            double acc = 0.0;
            if (i > 0) acc += u[k - 1] - c;
            if (i + 1 < N) acc += u[k + 1] - c;
            if (j > 0) acc += u[k - N] - c;
            if (j + 1 < N) acc += u[k + N] - c;
            out[k] = acc * inv_h2;
        }
    }
}

ScalarField neumann_laplacian(const ScalarField& u)
{
    std::vector<double> out(u.size());
    apply_neumann_laplacian(u.grid(), u.values(), out);
    return ScalarField(u.grid(), std::move(out));
}

}  // namespace beckmann
