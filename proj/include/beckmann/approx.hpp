#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace beckmann {

/// Vector-valued samples on a tensor grid in [0,1]^dim_in, axis 0 fastest;
/// values[p * dim_out + c] is component c at point p.
struct SampledField {
    std::vector<std::vector<double>> axes;
    int dim_out = 1;
    std::vector<double> values;

    int dim_in() const { return static_cast<int>(axes.size()); }
    std::size_t points() const;
};

/// Tensor-product B-spline on clamped uniform knots with K intervals per axis.
struct SplineApproximant {
    int degree = 3;
    int knots = 2;                   // K, intervals per axis
    int dim_in = 1;
    int dim_out = 1;
    std::vector<double> coefficients;  // dim_out blocks of (K + degree)^dim_in, axis 0 fastest
    double residual = 0.0;             // max |fit - data| at the samples

    int basis_per_axis() const { return knots + degree; }
};

/// Least-squares fit per output component. Requires at least 2 (K + degree)
/// samples per axis and full column rank of every axis collocation matrix.
SplineApproximant fit_spline(const SampledField& target, int knots, int degree = 3);

/// Value (ell = 0, dim_out entries) or Jacobian (ell = 1, entry c * dim_in + a
/// is d s_c / d x_a) at a point of [0,1]^dim_in.
std::vector<double> eval_spline(const SplineApproximant& s, std::span<const double> point, int ell = 0);

/// Values (ell = 0) or the derivative along `axis` (ell = 1) on a tensor grid.
SampledField eval_spline_grid(const SplineApproximant& s, const std::vector<std::vector<double>>& axes, int ell = 0,
                              int axis = 0);

/// Target known in closed form: fills value[dim_out] and jacobian[dim_out * dim_in].
struct AnalyticTarget {
    int dim_in = 1;
    int dim_out = 1;
    std::function<void(std::span<const double> x, std::span<double> value, std::span<double> jacobian)> eval;
};

/// m + 1 equispaced points 0, 1/m, ..., 1.
std::vector<double> equispaced(int m);

SampledField sample(const AnalyticTarget& f, const std::vector<std::vector<double>>& axes);

struct RateStudy {
    int ell = 0;
    std::vector<int> knots;
    std::vector<double> errors;     // C^ell sup-norm error per K
    std::vector<double> residuals;  // fit residual per K
    double slope = 0.0;             // least-squares slope of log error against log K
};

/// C^ell error on a dense equispaced grid (16 points per knot interval at the
/// largest K, capped at 513 per axis). Each fit uses 4 (K + degree) samples per axis.
RateStudy rate_study(const AnalyticTarget& f, const std::vector<int>& knots, int ell, int degree = 3);

/// Fits the given samples and measures the error at the samples themselves;
/// for ell = 1 the reference derivatives are second-order grid differences.
RateStudy rate_study(const SampledField& data, const std::vector<int>& knots, int ell, int degree = 3);

}  // namespace beckmann
