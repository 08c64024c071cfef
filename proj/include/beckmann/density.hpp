#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beckmann/grid.hpp"

namespace beckmann {

/// Positive unit-mass grid density with certified bounds kappa <= rho <= bigK.
class Density {
public:
    /// Validates positivity and unit mass (within 1e-10).
    explicit Density(ScalarField field);

    const ScalarField& field() const { return field_; }
    const Grid& grid() const { return field_.grid(); }
    double kappa() const { return kappa_; }
    double bigK() const { return big_k_; }
    double operator[](std::size_t k) const { return field_[k]; }

private:
    ScalarField field_;
    double kappa_;
    double big_k_;
};

constexpr double kDefaultDensityFloor = 1e-3;
constexpr double kMassTolerance = 1e-10;

/// Clips f from below at floor and rescales to unit mass.
Density normalize(const ScalarField& f, double floor = kDefaultDensityFloor);

/// exp(-|x - center|^2 / (2 sigma^2)), clipped at floor and normalized.
Density gaussian_bump(const Grid& grid, std::span<const double> center, double sigma,
                      double floor = kDefaultDensityFloor);

Density uniform_density(const Grid& grid);

struct HolderEstimate {
    int k = 0;
    double alpha = 0.5;
    double sup_part = 0.0;
    double holder_part = 0.0;
    double norm = 0.0;
};

/// Samples of a function on a tensor grid with uniform spacing per axis.
/// Axis 0 varies fastest in `values`.
struct TensorSamples {
    std::vector<std::vector<double>> axes;  // node coordinates per axis
    std::vector<double> values;

    std::vector<int> shape() const;
    std::size_t size() const { return values.size(); }
};

TensorSamples tensor_samples(const ScalarField& f);

constexpr std::uint64_t kHolderSeed = 0x5eedb0a7ULL;
constexpr std::size_t kDefaultPairBudget = 200000;

/// Discrete C^{k,alpha} norm estimate on a tensor grid.
///
/// sup_part is the largest max-norm over all finite-difference derivatives of
/// order <= k. holder_part is the largest quotient |D f(x) - D f(x')| / |x - x'|^alpha
/// over derivatives of order exactly k. When all node pairs fit in pair_budget
/// they are enumerated; otherwise the quotient is taken over every neighbor
/// pair, every pair touching the extremal nodes of each derivative, and
/// pair_budget seeded random pairs, refined by alternating best-partner
/// scans from the best pair; it is a lower bound of the all-pairs value.
HolderEstimate holder_estimate(const TensorSamples& samples, int k, double alpha,
                               std::size_t pair_budget = kDefaultPairBudget, std::uint64_t seed = kHolderSeed);

HolderEstimate holder_norm_estimate(const ScalarField& f, int k, double alpha,
                                    std::size_t pair_budget = kDefaultPairBudget, std::uint64_t seed = kHolderSeed);

/// Finite-difference derivative D^beta of tensor samples (beta given per axis).
std::vector<double> tensor_derivative(const TensorSamples& samples, std::span<const int> beta);

}  // namespace beckmann
