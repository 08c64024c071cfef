#pragma once

#include <string_view>
#include <vector>

#include "beckmann/density.hpp"

namespace beckmann {

enum class PathKind { Linear, FisherRao, Tabulated };

std::string_view to_string(PathKind kind);

/// Curve t -> rho_t of densities from rho_nu (t = 0) to rho_mu (t = 1).
class ProbabilityPath {
public:
    /// rho_t = (1 - t) rho_nu + t rho_mu.
    static ProbabilityPath linear(Density rho_nu, Density rho_mu);
    /// rho_t = rho_nu^(1-t) rho_mu^t / Z_t. With literal_derivative the time
    /// derivative omits the normalization term (kept for comparison only; it
    /// is not mass-free).
    static ProbabilityPath fisher_rao(Density rho_nu, Density rho_mu, bool literal_derivative = false);
    /// Piecewise linear in t between stored slices. t_nodes must increase
    /// strictly from 0 to 1 and the end slices must be valid densities;
    /// interior slices are checked by validate_path.
    static ProbabilityPath tabulated(std::vector<double> t_nodes, std::vector<ScalarField> slices);

    PathKind kind() const { return kind_; }
    const Density& rho_nu() const { return rho_nu_; }
    const Density& rho_mu() const { return rho_mu_; }
    const Grid& grid() const { return rho_nu_.grid(); }
    bool literal_derivative() const { return literal_; }
    /// Uniform lower bound on rho_t. Linear: min(kappa_nu, kappa_mu).
    /// Fisher-Rao: kappa / (K |Omega|) with the joint bounds of the endpoints.
    /// Tabulated: smallest stored value.
    double kappa_path() const { return kappa_path_; }

    const std::vector<double>& table_times() const { return table_t_; }
    const std::vector<ScalarField>& table_slices() const { return table_; }

private:
    ProbabilityPath(PathKind kind, Density nu, Density mu);

    PathKind kind_;
    Density rho_nu_;
    Density rho_mu_;
    bool literal_ = false;
    double kappa_path_ = 0.0;
    std::vector<double> table_t_;
    std::vector<ScalarField> table_;
};

/// rho_t without validation. Endpoints return the stored arrays bitwise.
ScalarField path_field(const ProbabilityPath& p, double t);

/// rho_t as a Density; throws PathViolation when a tabulated slice is not one.
Density eval_path(const ProbabilityPath& p, double t);

/// Z_t = int rho_nu^(1-t) rho_mu^t dx (Fisher-Rao only); at most 1 by Hölder.
double fisher_rao_normalizer(const ProbabilityPath& p, double t);

struct PathDerivative {
    double t = 0.0;
    ScalarField rho_dot;
    double mass_defect = 0.0;  // |int rho_dot|
};

PathDerivative path_derivative(const ProbabilityPath& p, double t);

struct PathNodeReport {
    double t = 0.0;
    double mass = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
    double derivative_mass_defect = 0.0;
};

struct PathReport {
    std::vector<PathNodeReport> nodes;
    double kappa_path = 0.0;  // smallest value met on the nodes
    double max_mass_error = 0.0;
    double max_derivative_defect = 0.0;
};

/// Throws PathViolation if a node's mass is off by more than 1e-8 or its
/// minimum is not positive.
PathReport validate_path(const ProbabilityPath& p, const std::vector<double>& t_nodes);

constexpr double kPathMassTolerance = 1e-8;

}  // namespace beckmann
