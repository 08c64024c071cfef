#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace beckmann {

/// Uniform cell-centered discretization of the unit box (0,1)^dim.
///
/// Nodes sit at (i + 1/2) h with h = 1/n. Node (i, j) is stored at linear
/// index i + n*j, i.e. the x axis is the fastest-varying one.
class Grid {
public:
    Grid(int dim, int n);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double h() const { return h_; }
    std::size_t size() const { return size_; }

    double coord(int i) const { return (i + 0.5) * h_; }
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * j; }
    std::array<int, 2> multi_index(std::size_t k) const;
    /// Physical coordinates of node k; unused trailing entries are zero.
    std::array<double, 2> node(std::size_t k) const;
    /// Stride between neighbors along an axis.
    std::size_t stride(int axis) const { return axis == 0 ? 1 : static_cast<std::size_t>(n_); }

    bool operator==(const Grid&) const = default;

private:
    int dim_;
    int n_;
    double h_;
    std::size_t size_;
};

/// Grid function: one finite real per node.
class ScalarField {
public:
    explicit ScalarField(const Grid& grid, double fill = 0.0);
    ScalarField(const Grid& grid, std::vector<double> values);

    template <class F>
    static ScalarField sample(const Grid& grid, F&& fn)
    {
        std::vector<double> v(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            auto x = grid.node(k);
            v[k] = fn(x);
        }
        return ScalarField(grid, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> mutable_values() { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }

    double max_abs() const;
    double min() const;
    double max() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double c);

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

/// Grid vector field with grid.dim() components.
class VectorField {
public:
    explicit VectorField(const Grid& grid);
    explicit VectorField(std::vector<ScalarField> components);

    const Grid& grid() const { return grid_; }
    int dim() const { return static_cast<int>(components_.size()); }
    const ScalarField& operator[](int a) const { return components_[static_cast<std::size_t>(a)]; }
    ScalarField& operator[](int a) { return components_[static_cast<std::size_t>(a)]; }

    double max_abs() const;
    /// Pointwise Euclidean norm squared.
    ScalarField norm_squared() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator*=(double c);

private:
    Grid grid_;
    std::vector<ScalarField> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double c, VectorField a);

/// Midpoint quadrature of f over the unit box: h^dim * sum of values.
double integrate(const ScalarField& f);

/// Second-order finite-difference partial derivative along one axis.
ScalarField partial(const ScalarField& f, int axis);
/// Centered differences inside, one-sided second-order differences on the
/// first and last layer of every axis.
VectorField gradient(const ScalarField& f);
VectorField gradient(const ScalarField& f, int axis_count);
ScalarField divergence(const VectorField& v);

/// Differentiates a tensor-shaped array along one axis with the grid stencils.
/// shape[a] >= 4 is required on the differentiated axis.
void differentiate_axis(std::span<const double> values, std::span<const int> shape, double spacing, int axis,
                        std::span<double> out);

/// Quadratic extrapolation of node data to the wall x_axis = 0 (side 0) or
/// x_axis = 1 (side 1). Returns one value per wall node, in the order of the
/// remaining axis (a single value for dim 1).
std::vector<double> wall_values(const ScalarField& f, int axis, int side);

/// Largest |w . eta| over the walls, with w extrapolated to the wall faces.
double boundary_normal_flux(const VectorField& w);

/// Discrete Neumann Laplacian (3-point in 1D, 5-point in 2D) with ghost-cell
/// reflection at the walls.
void apply_neumann_laplacian(const Grid& grid, std::span<const double> u, std::span<double> out);
ScalarField neumann_laplacian(const ScalarField& u);

}  // namespace beckmann
