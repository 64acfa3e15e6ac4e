#pragma once

#include <optional>
#include <vector>

#include "mcfobs/grid.hpp"
#include "mcfobs/scenario.hpp"
#include "mcfobs/scheme.hpp"

namespace mcfobs {

/// Ball-condition radius of the front {d = 0}: min of 1 / max|kappa| over
/// contour samples and half the smallest distance between distinct contour
/// components, capped at the grid diameter. kappa is the curvature of the
/// circle through each sample and the contour points 6 cells of arc either
/// side of it. Where that is pessimistic (mask-derived staircase fronts) the
/// largest r for which {d < 0} and its complement survive opening by lattice
/// r-balls is used instead. Throws UndefinedDistance when the front is empty.
double delta_ball_estimate(const ScalarField& d);

struct ResidualRow {
    int step = 0;
    double time = 0.0;
    std::size_t off_contact_samples = 0;
    double off_contact_median_abs = 0.0;
    double off_contact_max_abs = 0.0;
    std::size_t contact_samples = 0;
    double contact_min_residual = 0.0;
    double contact_max_laplacian = 0.0;
    double contact_median_abs_dt = 0.0;
    /// Allowance for the O(d) terms: max|d| on the band / delta^2.
    double tolerance = 0.0;
};

struct ResidualReport {
    std::vector<ResidualRow> rows;
};

/// r = (d_{n+1} - d_n) / h - Lap d_n on the band |d_n| <= 5 spacing, split
/// by the contact set |d_n - d_omega| < 2 spacing. Needs kept fields and at
/// least 3 states. The obstacle field is signed_distance(omega) when omega is
/// given, else the trajectory's own obstacle field (if any). Throws
/// InvalidArgument when a closed front's band reaches the grid boundary.
ResidualReport pde_residual(const FlowTrajectory& traj, const std::optional<RegionMask>& omega = std::nullopt);

/// max over state pairs with 0 < t - s <= 1 of |E(t) xor E(s)| / (t - s)^{1/3}.
double holder_quotient(const FlowTrajectory& traj);

/// Closeness check after one step: with delta' = delta_E / 2,
/// max over {|d_E| <= delta'} of |u - d_E| against h / (delta_E - delta') + 2 spacing.
struct OneStepBound {
    double delta_E = 0.0;
    double delta_prime = 0.0;
    double h = 0.0;
    double max_deviation = 0.0;
    double bound = 0.0;
    bool holds() const { return max_deviation <= bound; }
};
OneStepBound one_step_bound(const ScalarField& d_E, const ScalarField& u, double h);

/// Domain-truncation check: one prox solve of the step from E on the given
/// grid and on a grid enlarged by `growth` (split evenly between the sides,
/// new cells outside E and outside omega). Returns the sup difference of the
/// two minimizers over the original samples.
double domain_growth_difference(const RegionMask& E, const std::optional<RegionMask>& omega, const FlowConfig& cfg,
                                double growth = 0.25);

struct ConvergenceLevel {
    double h = 0.0;
    int n = 0;
    double spacing = 0.0;
    double radius = 0.0;            // length-weighted mean front radius at T (disk)
    double reference_radius = 0.0;  // sqrt(r0^2 - 2T) for the disk
    double radius_error = 0.0;
    double hausdorff_error = 0.0;  // front vs the analytic reference curve
    bool pinning = false;
    int steps = 0;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    /// Radius error strictly decreasing along the levels.
    bool strictly_decreasing() const;
    bool hausdorff_decreasing() const;
    bool pinning_flagged() const;
};

/// A level's prox failed to converge; `level` is its index in the study.
class ConvergenceAborted : public Error {
public:
    ConvergenceAborted(int level, const std::string& why)
        : Error("convergence study aborted at level " + std::to_string(level) + ": " + why), level(level) {}
    int level;
};

/// Runs `base` once per (h, n) level and measures the terminal front against
/// the analytic reference: a circle of radius sqrt(r0^2 - 2T) for a disk, the
/// unchanged lines for a strip. Needs an unobstructed disk or strip scenario.
ConvergenceReport convergence_study(const Scenario& base, const std::vector<double>& h_list,
                                    const std::vector<int>& n_list);

}  // namespace mcfobs
