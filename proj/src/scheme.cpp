#include "mcfobs/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcfobs/analysis.hpp"
#include "mcfobs/geometry.hpp"

namespace mcfobs {

namespace {

constexpr double kAmbiguous = 1e-9;

StepOutput finish(ProxResult prox, const ScalarField& input, const FlowConfig& cfg) {
    const Grid2& g = input.grid();
    const double scale = std::max(input.max_abs(), 1.0);
    RegionMask mask = RegionMask::sublevel(prox.u);
    RegionMask ambiguous(g);
    for (std::size_t k = 0; k < g.size(); ++k) ambiguous.set(k, std::abs(prox.u[k]) < kAmbiguous * scale);
    StepOutput out{std::move(mask), std::nullopt, std::move(prox), std::move(ambiguous), false};
    if (out.mask.empty()) {
        out.extinct = true;
    } else {
        try {
            ScalarField d = redistance(out.prox.u, cfg.cap);
            double depth = 0.0;
            for (std::size_t k = 0; k < d.size(); ++k) depth = std::max(depth, -d[k]);
            if (depth < g.spacing()) out.extinct = true;
            else out.field = std::move(d);
        } catch (const VanishedSet&) {
            out.extinct = true;
        }
    }
    if (out.extinct) out.mask = RegionMask(g);
    if (!out.prox.converged) throw NonConvergence(-1, std::move(out));
    return out;
}

ProxParams prox_params(const FlowConfig& cfg) {
    if (!(cfg.h > 0.0)) throw InvalidArgument("h must be positive");
    ProxParams p = cfg.prox;
    p.h = cfg.h;
    return p;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1) + 0.5));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

StepDiagnostics shape_diagnostics(const ScalarField& d, const Contour& front) {
    StepDiagnostics diag;
    diag.area = area_sublevel(d);
    diag.perimeter = front.length();
    diag.tv_perimeter = tv_perimeter(d);
    try {
        diag.delta_ball = delta_ball_estimate(d);
    } catch (const UndefinedDistance&) {
        diag.delta_ball = 0.0;
    }
    return diag;
}

void curvature_residual(StepDiagnostics& diag, const ScalarField& d_new, const Contour& front, const ScalarField& d_old,
                        const ScalarField* d_omega, double h) {
    const double s = d_new.grid().spacing();
    const CurvatureSamples cs = curvature_on_contour(d_new, front);
    std::vector<double> res;
    res.reserve(cs.kappa.size());
    for (std::size_t k = 0; k < cs.kappa.size(); ++k) {
        const Point p = cs.points[k];
        if (d_omega && d_omega->interpolate(p) > -3.0 * s) continue;
        res.push_back(std::abs(cs.kappa[k] + d_old.interpolate(p) / h));
    }
    diag.curvature_samples = res.size();
    diag.curvature_residual_median = quantile(res, 0.5);
    diag.curvature_residual_p95 = quantile(res, 0.95);
}

void check_padding(const ScalarField& d0, double h, const char* what) {
    const Grid2& g = d0.grid();
    const Contour front = extract_contour(d0);
    const Point lo = g.domain_min();
    const Point hi = g.domain_max();
    double pad = std::numeric_limits<double>::infinity();
    for (const auto& pl : front.polylines) {
        if (!pl.closed) continue;
        for (const auto& p : pl.points) pad = std::min({pad, p.x - lo.x, hi.x - p.x, p.y - lo.y, hi.y - p.y});
    }
    const double need = 10.0 * std::sqrt(h);
    if (pad + g.spacing() < need) {
        std::ostringstream os;
        os << what << " front is " << pad << " from the grid boundary, padding of " << need << " (10 sqrt(h)) required";
        throw InvalidArgument(os.str());
    }
}

}  // namespace

const char* to_string(Variant v) {
    switch (v) {
        case Variant::Obstacle: return "obstacle";
        case Variant::Unconstrained: return "unconstrained";
        case Variant::Forcing: return "forcing";
        case Variant::PcfFrozen: return "pcf_frozen";
        case Variant::PcfRefresh: return "pcf_refresh";
    }
    return "unknown";
}

Variant parse_variant(const std::string& s) {
    for (Variant v : {Variant::Obstacle, Variant::Unconstrained, Variant::Forcing, Variant::PcfFrozen,
                      Variant::PcfRefresh}) {
        if (s == to_string(v)) return v;
    }
    throw InvalidArgument("unknown variant '" + s + "'");
}

std::vector<double> FlowTrajectory::times() const {
    std::vector<double> t;
    t.reserve(states.size());
    for (const auto& s : states) t.push_back(s.time);
    return t;
}

NonConvergence::NonConvergence(int step, StepOutput partial)
    : Error("prox did not converge" + (step >= 0 ? " at step " + std::to_string(step) : std::string())),
      step_(step),
      partial_(std::move(partial)) {}

bool pinning_regime(double h, double spacing) { return std::sqrt(2.0 * h) < 3.0 * spacing; }

StepOutput step(const ScalarField& d_E, const ObstacleSpec& obstacle, const FlowConfig& cfg) {
    ProxResult prox = tv_prox(d_E, obstacle, prox_params(cfg));
    return finish(std::move(prox), d_E, cfg);
}

double default_forcing_constant(const ScalarField& d_omega) { return 2.0 * 2.0 / delta_ball_estimate(d_omega); }

StepOutput step_forcing(const ScalarField& d_E, const RegionMask& omega, const FlowConfig& cfg) {
    require_same_grid(d_E.grid(), omega.grid());
    const double C = cfg.forcing_C ? *cfg.forcing_C : default_forcing_constant(signed_distance(omega, cfg.cap));
    const ScalarField f = forcing_input(d_E, omega, C, cfg.h);
    ProxResult prox = tv_prox(f, ObstacleSpec::unconstrained(), prox_params(cfg));
    return finish(std::move(prox), f, cfg);
}

namespace {

FlowTrajectory run_from(ScalarField d0, const std::optional<RegionMask>& omega, const FlowConfig& cfg) {
    const Grid2& g = d0.grid();
    if (!(cfg.h > 0.0) || !(cfg.T >= cfg.h * (1.0 - 1e-12))) throw InvalidArgument("need 0 < h <= T");
    const Variant var = cfg.variant;
    const bool pcf = var == Variant::PcfFrozen || var == Variant::PcfRefresh;
    const RegionMask E0 = RegionMask::sublevel(d0);
    if (E0.empty()) throw InvalidArgument("initial set is empty");

    FlowTrajectory traj{g, cfg.h, var, {}, std::nullopt, {}, std::nullopt, std::nullopt, 0.0};
    if (var == Variant::Obstacle || var == Variant::Forcing) {
        if (!omega) throw InvalidArgument(std::string("variant ") + to_string(var) + " needs an obstacle region");
        require_same_grid(g, omega->grid());
        if (!E0.subset_of(*omega)) throw InvalidArgument("initial set not contained in obstacle");
        traj.omega = *omega;
        traj.omega_field = signed_distance(*omega, cfg.cap);
        if (var == Variant::Forcing) {
            traj.forcing_C = cfg.forcing_C ? *cfg.forcing_C : default_forcing_constant(*traj.omega_field);
            if (!(traj.forcing_C > 0.0)) throw InvalidArgument("forcing constant must be positive");
        }
    } else if (pcf) {
        traj.omega = E0;
        traj.omega_field = d0;
    }
    check_padding(d0, cfg.h, "initial");
    if (pinning_regime(cfg.h, g.spacing())) {
        std::ostringstream os;
        os << "pinning regime: sqrt(2h) = " << std::sqrt(2.0 * cfg.h) << " < 3 spacing = " << 3.0 * g.spacing();
        traj.warnings.push_back(os.str());
    }

    Contour front = extract_contour(d0);
    {
        FlowState s0{0, 0.0, E0, std::nullopt, RegionMask(g), shape_diagnostics(d0, front)};
        if (cfg.keep_fields) s0.field = d0;
        traj.states.push_back(std::move(s0));
    }

    const int steps = static_cast<int>(std::floor(cfg.T / cfg.h + 1e-9));
    FlowConfig step_cfg = cfg;
    step_cfg.forcing_C = traj.forcing_C;
    std::optional<ObstacleSpec> fixed_obstacle;
    if (var == Variant::Obstacle || var == Variant::PcfFrozen) fixed_obstacle = ObstacleSpec::constrained(*traj.omega_field);
    ScalarField d = std::move(d0);

    for (int n = 1; n <= steps; ++n) {
        StepOutput out{RegionMask(g), std::nullopt, ProxResult(g), RegionMask(g), false};
        const ScalarField* d_omega = traj.omega_field ? &*traj.omega_field : nullptr;
        try {
            switch (var) {
                case Variant::Unconstrained: out = step(d, ObstacleSpec::unconstrained(), step_cfg); break;
                case Variant::Obstacle:
                case Variant::PcfFrozen: out = step(d, *fixed_obstacle, step_cfg); break;
                case Variant::PcfRefresh:
                    out = step(d, ObstacleSpec::constrained(d), step_cfg);
                    d_omega = &d;
                    break;
                case Variant::Forcing: out = step_forcing(d, *traj.omega, step_cfg); break;
            }
        } catch (const NonConvergence& e) {
            throw NonConvergence(n, e.partial());
        }

        FlowState st{n, n * cfg.h, out.mask, std::nullopt, out.ambiguous, {}};
        if (out.extinct) {
            st.diag.prox_gap = out.prox.gap;
            st.diag.prox_iterations = out.prox.iterations;
            st.diag.converged = out.prox.converged;
            st.diag.ambiguous_cells = out.ambiguous.count();
            if (cfg.keep_fields) st.field = ScalarField(g, cfg.cap.resolve(g));
            traj.states.push_back(std::move(st));
            traj.extinction_step = n;
            break;
        }
        const ScalarField& dn = *out.field;
        Contour next_front = extract_contour(dn);
        st.diag = shape_diagnostics(dn, next_front);
        st.diag.hausdorff_motion = hausdorff(front, next_front);
        curvature_residual(st.diag, dn, next_front, d, d_omega, cfg.h);
        st.diag.prox_gap = out.prox.gap;
        st.diag.prox_iterations = out.prox.iterations;
        st.diag.converged = out.prox.converged;
        st.diag.ambiguous_cells = out.ambiguous.count();
        if (cfg.keep_fields) st.field = dn;
        traj.states.push_back(std::move(st));
        d = std::move(*out.field);
        front = std::move(next_front);
    }
    // The final field is always kept so callers can measure the end state.
    if (!traj.extinction_step && !traj.states.back().field) traj.states.back().field = std::move(d);
    return traj;
}

}  // namespace

FlowTrajectory run(const ScalarField& phi0, const std::optional<RegionMask>& omega, const FlowConfig& cfg) {
    return run_from(redistance(phi0, cfg.cap), omega, cfg);
}

FlowTrajectory run(const RegionMask& E0, const std::optional<RegionMask>& omega, const FlowConfig& cfg) {
    if (E0.empty()) throw InvalidArgument("initial set is empty");
    return run_from(signed_distance(E0, cfg.cap), omega, cfg);
}

FlowTrajectory pcf_run(const RegionMask& E0, const FlowConfig& cfg) {
    if (cfg.variant != Variant::PcfFrozen && cfg.variant != Variant::PcfRefresh) {
        throw InvalidArgument("pcf_run needs variant pcf_frozen or pcf_refresh");
    }
    return run(E0, std::nullopt, cfg);
}

FlowTrajectory pcf_run(const ScalarField& phi0, const FlowConfig& cfg) {
    if (cfg.variant != Variant::PcfFrozen && cfg.variant != Variant::PcfRefresh) {
        throw InvalidArgument("pcf_run needs variant pcf_frozen or pcf_refresh");
    }
    return run(phi0, std::nullopt, cfg);
}

}  // namespace mcfobs
