#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcfobs/distance.hpp"
#include "mcfobs/grid.hpp"
#include "mcfobs/obstacle_tv.hpp"

namespace mcfobs {

enum class Variant { Obstacle, Unconstrained, Forcing, PcfFrozen, PcfRefresh };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

struct FlowConfig {
    double h = 1e-4;
    double T = 0.0;
    /// prox.h is overwritten with h.
    ProxParams prox;
    DistanceCap cap;
    /// Forcing constant; defaults to 4 / delta_ball_estimate(d_omega).
    std::optional<double> forcing_C;
    Variant variant = Variant::Unconstrained;
    /// Keep the redistanced field of every state (memory heavy on big grids).
    /// When false only the final state's field is kept.
    bool keep_fields = true;
};

struct StepDiagnostics {
    double area = 0.0;
    double perimeter = 0.0;
    double tv_perimeter = 0.0;
    double hausdorff_motion = 0.0;
    double curvature_residual_median = 0.0;
    double curvature_residual_p95 = 0.0;
    std::size_t curvature_samples = 0;
    double delta_ball = 0.0;
    double prox_gap = 0.0;
    int prox_iterations = 0;
    bool converged = true;
    std::size_t ambiguous_cells = 0;
};

struct StepOutput {
    RegionMask mask;
    /// Redistanced field of the new set; unset when the set vanished.
    std::optional<ScalarField> field;
    ProxResult prox;
    /// Cells with |u| < 1e-9 scale.
    RegionMask ambiguous;
    bool extinct = false;
};

struct FlowState {
    int step = 0;
    double time = 0.0;
    RegionMask mask;
    std::optional<ScalarField> field;
    RegionMask ambiguous;
    StepDiagnostics diag;
};

struct FlowTrajectory {
    Grid2 grid;
    double h = 0.0;
    Variant variant = Variant::Unconstrained;
    std::vector<FlowState> states;  // states[0] is t = 0
    std::optional<int> extinction_step;
    std::vector<std::string> warnings;
    std::optional<RegionMask> omega;
    std::optional<ScalarField> omega_field;
    double forcing_C = 0.0;

    std::vector<double> times() const;
};

/// Prox did not reach tolerance; carries the unconverged step and its index
/// (when raised from a run).
class NonConvergence : public Error {
public:
    NonConvergence(int step, StepOutput partial);
    int step() const { return step_; }
    const StepOutput& partial() const { return partial_; }

private:
    int step_;
    StepOutput partial_;
};

/// One step {S_{h,v}(d_E) < 0}: prox, strict sublevel, redistance. Throws
/// NonConvergence (step index -1) if the prox misses tolerance.
StepOutput step(const ScalarField& d_E, const ObstacleSpec& obstacle, const FlowConfig& cfg);

/// Unconstrained prox of d_E + C h outside omega, then as step(). C comes from
/// cfg.forcing_C or the default for omega.
StepOutput step_forcing(const ScalarField& d_E, const RegionMask& omega, const FlowConfig& cfg);

/// Default forcing constant 2n / R with n = 2 and R = delta_ball_estimate(d_omega).
double default_forcing_constant(const ScalarField& d_omega);

/// Iterates floor(T / h) steps from E0 (or from an initial level-set field,
/// which is redistanced first). omega is required for Obstacle and Forcing,
/// ignored by the PCF variants (their obstacle is the initial / previous set).
/// Throws InvalidArgument for invalid setups ("initial set not contained in
/// obstacle", insufficient padding) and NonConvergence with the step index.
FlowTrajectory run(const RegionMask& E0, const std::optional<RegionMask>& omega, const FlowConfig& cfg);
FlowTrajectory run(const ScalarField& phi0, const std::optional<RegionMask>& omega, const FlowConfig& cfg);

/// run() with variant PcfFrozen or PcfRefresh.
FlowTrajectory pcf_run(const RegionMask& E0, const FlowConfig& cfg);
FlowTrajectory pcf_run(const ScalarField& phi0, const FlowConfig& cfg);

/// True when sqrt(2h) < 3 spacing (fronts risk pinning on the grid).
bool pinning_regime(double h, double spacing);

}  // namespace mcfobs
