#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcfobs/kernels.hpp"

namespace mcfobs::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    /// Smaller grids and fewer samples; for smoke tests, not for acceptance.
    bool quick = false;
    std::uint64_t seed = 20240611;
    kernels::Exec exec = kernels::Exec::Parallel;
};

// Prox properties on random smooth inputs.
/// 100 ordered pairs f1 <= f2, v1 <= v2 on 64^2: returns the monotonicity
/// check (u1 <= u2 + 2 tol scale) and the L-infinity check on the same solves.
std::vector<CheckResult> prox_monotonicity_and_bound(const Options& o);
CheckResult prox_lipschitz(const Options& o);
CheckResult prox_translation(const Options& o);
CheckResult prox_deep_obstacle(const Options& o);

// Scheme.
CheckResult disk_law(const Options& o);
CheckResult one_step_radius(const Options& o);
CheckResult strip_stationary(const Options& o);
CheckResult step_set_monotonicity(const Options& o);
CheckResult obstacle_inclusion(const Options& o);
CheckResult one_step_closeness_bound(const Options& o);
CheckResult forcing_equivalence(const Options& o);
/// Frozen vs Refresh equality and nesting of both trajectories.
std::vector<CheckResult> pcf_equality_and_nesting(const Options& o);
CheckResult pinned_neck(const Options& o);
/// Three-level disk refinement plus the pinning negative control.
CheckResult convergence(const Options& o);
/// Same run at tol and tol/10: max per-step Hausdorff distance <= 2 spacing.
CheckResult tolerance_stability(const Options& o);

const std::vector<std::string>& suite_names();
/// Throws InvalidArgument for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& name, const Options& o);

}  // namespace mcfobs::verify
