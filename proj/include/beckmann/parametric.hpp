#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "beckmann/density.hpp"
#include "beckmann/poisson.hpp"

namespace beckmann {

/// A parameter value in Theta = (0,1)^q, q in {1,2}; unused entries are 0.
using Theta = std::array<double, 2>;

/// Beckmann problems indexed by theta: a fixed source and a target per node.
class ParametricFamily {
public:
    using Target = std::function<Density(const Theta&)>;

    /// Evaluates and validates every target; throws std::invalid_argument on
    /// a grid mismatch or a node outside Theta.
    ParametricFamily(int q, std::vector<Theta> theta_nodes, Density rho_nu, const Target& rho_mu_of);

    /// Nodes on the tensor product of the given axes, axis 0 fastest.
    static ParametricFamily on_tensor(std::vector<std::vector<double>> theta_axes, Density rho_nu,
                                      const Target& rho_mu_of);

    int q() const { return q_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<Theta>& theta_nodes() const { return nodes_; }
    const Density& rho_nu() const { return rho_nu_; }
    const Density& target(std::size_t i) const { return targets_[i]; }
    /// f(theta_i) = rho_mu(theta_i) - rho_nu.
    ScalarField rhs(std::size_t i) const;
    const Grid& grid() const { return rho_nu_.grid(); }
    /// Empty unless built by on_tensor.
    const std::vector<std::vector<double>>& theta_axes() const { return axes_; }

private:
    int q_;
    std::vector<Theta> nodes_;
    Density rho_nu_;
    std::vector<Density> targets_;
    std::vector<std::vector<double>> axes_;
};

/// m cell-centered nodes (i + 1/2) / m.
std::vector<double> theta_axis(int m);

/// q = 1: rho_nu a bump at the box center, rho_mu(theta) a bump whose center
/// moves along a diagonal segment as theta goes from 0 to 1.
ParametricFamily shifting_bump_family(const Grid& grid, int nodes);

/// q = 1: rho_mu(theta) = (1 - theta) rho_nu + theta rho_mu1, so f(theta) = theta f_1.
ParametricFamily scaling_family(const Density& rho_nu, const Density& rho_mu1, int nodes);

/// One mean-zero solve per node, in node order. Solver errors carry the node.
std::vector<Potential> solve_family(const ParametricFamily& family, const SolverOptions& options = {});

struct StabilityPair {
    std::size_t i = 0;
    std::size_t j = 0;
    double num = 0.0;
    double den = 0.0;
    double ratio = 0.0;
};

struct StabilityReport {
    std::vector<StabilityPair> pairs;
    double beta = 1.0;
    std::optional<double> max_ratio;  // empty when every pair was skipped
    std::size_t skipped = 0;          // pairs with den < kStabilityFloor
    int num_order = 2;
    int den_order = 0;
    double alpha = 0.5;
};

constexpr double kStabilityFloor = 1e-12;

/// For every node pair, the C^{min(k+2,2),alpha} norm estimate of u_i - u_j
/// over the C^{order-2,alpha} estimate of f_i - f_j. beta is recorded only:
/// the |theta - vartheta|^beta factors cancel in the ratio.
StabilityReport stability_ratios(const ParametricFamily& family, const std::vector<Potential>& solutions, int k,
                                 double alpha, double beta);

/// Samples over Theta x Omega: one spatial slice per theta node of a tensor
/// theta grid, theta axis 0 fastest.
struct ThetaField {
    std::vector<std::vector<double>> theta_axes;
    std::vector<ScalarField> slices;

    int q() const { return static_cast<int>(theta_axes.size()); }
    Theta node(std::size_t s) const;
};

ThetaField family_rhs_field(const ParametricFamily& family);
ThetaField family_potential_field(const ParametricFamily& family, const std::vector<Potential>& solutions);

/// (theta, x) flattened into one (q + d)-dimensional tensor grid, spatial axes first.
TensorSamples joint_samples(const ThetaField& field);

/// C^{k,alpha} estimate on Theta x Omega, mixed derivatives included.
HolderEstimate joint_holder_estimate(const ThetaField& field, int k, double alpha,
                                     std::size_t pair_budget = kDefaultPairBudget, std::uint64_t seed = kHolderSeed);

struct BanachHolderEstimate {
    int l = 0;
    int k = 0;
    double alpha = 0.5;
    double beta = 0.5;
    double sup_part = 0.0;     // max over |m| <= l and theta of ||D^m f(theta)||_{C^{k,alpha}}
    double holder_part = 0.0;  // max over |m| = l and node pairs of ||D^m f(theta) - D^m f(vartheta)|| / |theta - vartheta|^beta
    double norm = 0.0;
};

/// Two-stage C^{l,beta}(Theta; C^{k,alpha}(Omega)) estimate: spatial norms per
/// theta node, then a quotient over all node pairs. Theta derivatives are grid
/// differences; l in {0,1}.
BanachHolderEstimate banach_holder_estimate(const ThetaField& field, int l, int k, double alpha, double beta,
                                            std::size_t pair_budget = kDefaultPairBudget,
                                            std::uint64_t seed = kHolderSeed);

/// (2 + sqrt(d)) diam(Omega)^(1 - alpha) for the unit box.
double joint_inclusion_constant(int d, double alpha);

}  // namespace beckmann
