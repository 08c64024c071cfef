#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "beckmann/density.hpp"
#include "beckmann/vectorfield.hpp"

namespace beckmann {

using Point = std::array<double, 2>;
/// Row-major d x d matrix; 1D uses entry 0 only.
using Matrix = std::array<double, 4>;

/// Continuous-in-space evaluation of a TransportField.
///
/// Fluxes, densities and their grid gradients are extended to the walls
/// (normal flux component set to zero there, everything else extrapolated
/// quadratically) and interpolated multilinearly in x and linearly in t.
/// The velocity is -w/rho and its Jacobian follows from the quotient rule.
class VelocitySampler {
public:
    explicit VelocitySampler(const TransportField& tf);

    int dim() const { return dim_; }
    Point velocity(double t, const Point& x) const;
    /// Velocity and its spatial Jacobian d xi_a / d x_b at (t, x).
    void velocity_and_jacobian(double t, const Point& x, Point& xi, Matrix& dxi) const;

private:
    struct Slice {
        std::vector<std::vector<double>> w;      // dim extended arrays
        std::vector<std::vector<double>> dw;     // dim*dim, entry a*dim + b = d w_a / d x_b
    };
    struct RhoSlice {
        std::vector<double> rho;
        std::vector<std::vector<double>> drho;   // dim
    };
    struct Stencil {
        std::array<std::size_t, 4> idx{};
        std::array<double, 4> wt{};
        int count = 0;
    };

    Stencil stencil(const Point& x) const;
    void evaluate(double t, const Point& x, bool with_jacobian, Point& xi, Matrix& dxi) const;

    int dim_;
    int n_;
    double h_;
    std::vector<double> flux_times_;
    std::vector<Slice> flux_;
    std::vector<double> rho_times_;
    std::vector<RhoSlice> rho_;
};

struct FlowOptions {
    int steps = 256;                   // RK4 steps per unit time, >= 8
    double t_start = 0.0;
    double t_end = 1.0;
    std::vector<double> output_times;  // empty: {t_end}; each on the step lattice
};

struct FlowMap {
    int dim = 1;
    std::vector<Point> particles;      // start positions at t_start
    std::vector<double> times;
    std::vector<std::vector<Point>> positions_at;
    std::vector<std::vector<Matrix>> jacobians_at;  // filled by integrate_jacobians
    int steps = 0;
    double t_start = 0.0;
    double t_end = 1.0;
    long projection_events = 0;
    double min_det = 1.0;

    std::size_t time_index(double t) const;
    bool has_jacobians() const { return !jacobians_at.empty(); }
};

/// Grid nodes as particle starts, in grid order.
std::vector<Point> grid_particles(const Grid& grid);

/// Classical fourth-order Runge-Kutta with fixed step 1/steps. Stage points
/// that leave the box are projected back onto it and counted.
FlowMap integrate_flow(const TransportField& tf, std::vector<Point> starts, const FlowOptions& options = {});

/// Integrates d/dt J = grad xi(t, Phi) J with J(t_start) = I alongside the
/// trajectories, by the same scheme; positions reproduce fm bitwise.
/// Throws SingularJacobian if det J <= 1e-12 after any step.
FlowMap integrate_jacobians(const FlowMap& fm, const TransportField& tf);

constexpr double kSingularDeterminant = 1e-12;

struct Pushforward {
    ScalarField density;
    double mass_defect = 0.0;   // |mass - 1| before renormalization
    std::size_t widened = 0;    // nodes whose fit needed cells beyond the adjacent ones
};

/// rho_nu(x0) / det J at the transported grid particles, scattered back to the
/// grid by an inverse-distance weighted local linear fit in the cells around
/// every node, then renormalized to unit mass.
Pushforward pushforward_density(const FlowMap& fm, std::size_t time_index, const Density& rho_nu);

struct TransportError {
    double l1 = 0.0;
    double linf = 0.0;
};

TransportError transport_error(const ScalarField& pushed, const ScalarField& target);

double determinant(const Matrix& m, int dim);

}  // namespace beckmann
