#include "mcfobs/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "mcfobs/analysis.hpp"
#include "mcfobs/distance.hpp"
#include "mcfobs/geometry.hpp"
#include "mcfobs/obstacle_tv.hpp"
#include "mcfobs/scenario.hpp"
#include "mcfobs/scheme.hpp"

namespace mcfobs::verify {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

template <class F>
CheckResult timed(F&& body) {
    const auto t0 = Clock::now();
    CheckResult r = body();
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

// Sum of compactly supported bumps (1 - r^2/w^2)^3 plus an offset.
struct Bump {
    Point c;
    double w;
    double a;
};

std::vector<Bump> random_bumps(std::mt19937_64& rng, int count, double amp, bool nonneg, double lo = 0.1,
                               double hi = 0.9, double wmin = 0.1, double wmax = 0.3) {
    std::uniform_real_distribution<double> pos(lo, hi);
    std::uniform_real_distribution<double> width(wmin, wmax);
    std::uniform_real_distribution<double> a(nonneg ? 0.0 : -amp, amp);
    std::vector<Bump> out;
    for (int k = 0; k < count; ++k) out.push_back({{pos(rng), pos(rng)}, width(rng), a(rng)});
    return out;
}

double eval_bumps(const std::vector<Bump>& bumps, Point p) {
    double v = 0.0;
    for (const auto& b : bumps) {
        const double q = 1.0 - (p.x - b.c.x) * (p.x - b.c.x) / (b.w * b.w) - (p.y - b.c.y) * (p.y - b.c.y) / (b.w * b.w);
        if (q > 0.0) v += b.a * q * q * q;
    }
    return v;
}

ScalarField bump_field(const Grid2& g, const std::vector<Bump>& bumps, double offset = 0.0) {
    return ScalarField::sample(g, [&](Point p) { return offset + eval_bumps(bumps, p); });
}

double certified_error(const ProxResult& r, double h) {
    return std::sqrt(2.0 * h * std::max(r.gap, 0.0)) / r.u.grid().spacing();
}

ProxParams prox_params(const Options& o, double h) {
    ProxParams p;
    p.h = h;
    p.exec = o.exec;
    return p;
}

double max_adjacent_difference(const ScalarField& f) {
    const Grid2& g = f.grid();
    double m = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (i + 1 < g.nx()) m = std::max(m, std::abs(f(i + 1, j) - f(i, j)));
            if (j + 1 < g.ny()) m = std::max(m, std::abs(f(i, j + 1) - f(i, j)));
        }
    }
    return m;
}

// Cells of `a` outside `b`, skipping cells listed in either ambiguity mask.
std::size_t excess_cells(const RegionMask& a, const RegionMask& b, const RegionMask* amb_a = nullptr,
                         const RegionMask* amb_b = nullptr) {
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!a[k] || b[k]) continue;
        if ((amb_a && (*amb_a)[k]) || (amb_b && (*amb_b)[k])) continue;
        ++n;
    }
    return n;
}

std::size_t front_cells(const RegionMask& m) {
    const Grid2& g = m.grid();
    std::size_t n = 0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const bool in = m(i, j);
            const bool edge = (i > 0 && m(i - 1, j) != in) || (i + 1 < g.nx() && m(i + 1, j) != in) ||
                              (j > 0 && m(i, j - 1) != in) || (j + 1 < g.ny() && m(i, j + 1) != in);
            if (edge) ++n;
        }
    }
    return n;
}

Scenario dumbbell(const Options& o, int full_steps, Variant variant) {
    Scenario s = preset("dumbbell_pcf");
    s.flow.T = full_steps * s.flow.h;
    if (o.quick) {
        // same physical time, coarser grid and step
        s.grid.n = 128;
        s.flow.h = std::max(4e-4, s.flow.h);
    }
    s.flow.variant = variant;
    s.obstacle.kind = variant == Variant::Obstacle ? "equals_initial" : "none";
    return s;
}

FlowTrajectory run_or_throw(const Scenario& s) { return run_scenario(s); }

}  // namespace

std::vector<CheckResult> prox_monotonicity_and_bound(const Options& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(o.seed);
    const int pairs = o.quick ? 10 : 100;
    const int n = o.quick ? 32 : 64;
    const Grid2 g = Grid2::unit_square(n);
    std::uniform_real_distribution<double> hdist(1e-3, 1e-2);
    int order_fail = 0;
    int bound_fail = 0;
    int not_converged = 0;
    double worst_order = 0.0;
    double worst_bound = 0.0;
    double tol = 0.0;
    for (int t = 0; t < pairs; ++t) {
        const double h = hdist(rng);
        const ScalarField f1 = bump_field(g, random_bumps(rng, 6, 1.0, false));
        ScalarField f2 = f1;
        const ScalarField df = bump_field(g, random_bumps(rng, 3, 0.5, true));
        const ScalarField v1 = bump_field(g, random_bumps(rng, 6, 1.0, false), -0.3);
        ScalarField v2 = v1;
        const ScalarField dv = bump_field(g, random_bumps(rng, 3, 0.5, true));
        for (std::size_t k = 0; k < g.size(); ++k) {
            f2[k] += df[k];
            v2[k] += dv[k];
        }
        const ProxParams p = prox_params(o, h);
        tol = p.tol;
        const ProxResult r1 = tv_prox(f1, ObstacleSpec::constrained(v1), p);
        const ProxResult r2 = tv_prox(f2, ObstacleSpec::constrained(v2), p);
        not_converged += !r1.converged + !r2.converged;
        const double scale = std::max({f1.max_abs(), f2.max_abs(), 1.0});
        double excess = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) excess = std::max(excess, r1.u[k] - r2.u[k]);
        worst_order = std::max(worst_order, excess / scale);
        if (excess > 2.0 * p.tol * scale) ++order_fail;
        for (const auto* pr : {&r1, &r2}) {
            const ScalarField& f = pr == &r1 ? f1 : f2;
            const ScalarField& v = pr == &r1 ? v1 : v2;
            const double sc = std::max(f.max_abs(), 1.0);
            const double bound = std::max(f.max_abs(), std::max(v.max(), 0.0));
            const double over = pr->u.max_abs() - bound;
            worst_bound = std::max(worst_bound, over / sc);
            if (over > p.tol * sc) ++bound_fail;
        }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    CheckResult mono{"prox monotonicity", order_fail == 0 && not_converged == 0,
                     fmt("%d/%d pairs violate u1 <= u2 + 2 tol scale; worst excess %.3e scale (limit %.1e); %d "
                         "unconverged solves",
                         order_fail, pairs, worst_order, 2.0 * tol, not_converged),
                     secs};
    CheckResult linf{"prox L-infinity bound", bound_fail == 0 && not_converged == 0,
                     fmt("%d/%d solves exceed max(|f|, |v+|) + tol scale; worst overshoot %.3e scale", bound_fail,
                         2 * pairs, worst_bound),
                     0.0};
    return {mono, linf};
}

CheckResult prox_lipschitz(const Options& o) {
    return timed([&] {
        std::mt19937_64 rng(o.seed + 1);
        const int cases = o.quick ? 5 : 20;
        const Grid2 g = Grid2::unit_square(o.quick ? 32 : 64);
        std::uniform_real_distribution<double> hdist(1e-3, 1e-2);
        int fail = 0;
        int not_converged = 0;
        double worst = -1e300;
        for (int t = 0; t < cases; ++t) {
            const ScalarField f = bump_field(g, random_bumps(rng, 6, 1.0, false));
            const ScalarField v = bump_field(g, random_bumps(rng, 6, 1.0, false), -0.3);
            const ProxParams p = prox_params(o, hdist(rng));
            const ProxResult r = tv_prox(f, ObstacleSpec::constrained(v), p);
            not_converged += !r.converged;
            const double scale = std::max(f.max_abs(), 1.0);
            const double lin = std::max(max_adjacent_difference(f), max_adjacent_difference(v));
            const double over = max_adjacent_difference(r.u) - lin;
            worst = std::max(worst, over / scale);
            if (over > 3.0 * p.tol * scale) ++fail;
        }
        return CheckResult{"prox Lipschitz preservation", fail == 0 && not_converged == 0,
                           fmt("%d/%d inputs exceed the input modulus + 3 tol scale; worst margin %.3e scale", fail,
                               cases, worst),
                           0.0};
    });
}

CheckResult prox_translation(const Options& o) {
    return timed([&] {
        std::mt19937_64 rng(o.seed + 2);
        const int n = o.quick ? 32 : 64;
        const Grid2 g = Grid2::unit_square(n);
        const int sx = n / 12;
        const int sy = n / 20 + 1;
        int fail = 0;
        double worst = 0.0;
        double worst_cert = 0.0;
        const int cases = o.quick ? 2 : 5;
        for (int t = 0; t < cases; ++t) {
            // Support stays inside [0.2, 0.8]^2 before and after the shift.
            const auto fb = random_bumps(rng, 4, 1.0, false, 0.35, 0.6, 0.05, 0.12);
            const auto vb = random_bumps(rng, 4, 1.0, false, 0.35, 0.6, 0.05, 0.12);
            const ScalarField f = bump_field(g, fb);
            const ScalarField v = bump_field(g, vb, -0.2);
            ScalarField fs(g);
            ScalarField vs(g);
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    fs((i + sx) % n, (j + sy) % n) = f(i, j);
                    vs((i + sx) % n, (j + sy) % n) = v(i, j);
                }
            }
            const ProxParams p = prox_params(o, 2e-3);
            const ProxResult a = tv_prox(f, ObstacleSpec::constrained(v), p);
            const ProxResult b = tv_prox(fs, ObstacleSpec::constrained(vs), p);
            const double scale = std::max(f.max_abs(), 1.0);
            double diff = 0.0;
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(b.u((i + sx) % n, (j + sy) % n) - a.u(i, j)));
            }
            // The gap certifies |u - u*| <= sqrt(2 h gap) / spacing for each solve.
            const double cert = certified_error(a, p.h) + certified_error(b, p.h);
            worst = std::max(worst, diff / scale);
            worst_cert = std::max(worst_cert, cert / scale);
            if (diff > cert || !a.converged || !b.converged) ++fail;
        }
        return CheckResult{"prox translation equivariance", fail == 0,
                           fmt("shift (%d, %d) cells, %d cases; worst |u_shifted - shift(u)| %.3e scale, certified "
                               "solver accuracy %.3e scale",
                               sx, sy, cases, worst, worst_cert),
                           0.0};
    });
}

CheckResult prox_deep_obstacle(const Options& o) {
    return timed([&] {
        std::mt19937_64 rng(o.seed + 3);
        const Grid2 g = Grid2::unit_square(o.quick ? 32 : 64);
        const ScalarField f = bump_field(g, random_bumps(rng, 6, 1.0, false));
        const ProxParams p = prox_params(o, 5e-3);
        const ProxResult free = tv_prox(f, ObstacleSpec::unconstrained(), p);
        const ProxResult deep = tv_prox(f, ObstacleSpec::constrained(ScalarField(g, -f.max_abs() - 1.0)), p);
        const double scale = std::max(f.max_abs(), 1.0);
        double diff = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) diff = std::max(diff, std::abs(free.u[k] - deep.u[k]));
        return CheckResult{"prox deep obstacle equals unconstrained",
                           diff <= 2.0 * p.tol * scale && free.converged && deep.converged,
                           fmt("max difference %.3e scale", diff / scale), 0.0};
    });
}

CheckResult disk_law(const Options& o) {
    return timed([&] {
        Scenario s = preset("disk");
        if (o.quick) {
            s.grid.n = 128;
            s.flow.h = 4e-4;
        }
        s.flow.keep_fields = false;
        const FlowTrajectory traj = run_or_throw(s);
        const double r0 = s.initial.radius;
        const double expect = std::sqrt(r0 * r0 - 2.0 * s.flow.T);
        if (traj.extinction_step) return CheckResult{"shrinking disk law", false, "set vanished before T", 0.0};
        const FlowState& last = traj.states.back();
        const double r = mean_radius(extract_contour(*last.field), s.initial.center);
        const double area_expect = M_PI * expect * expect;
        const double rel = std::abs(r - expect) / expect;
        const double area_rel = std::abs(last.diag.area - area_expect) / area_expect;
        return CheckResult{"shrinking disk law", rel <= 0.02 && area_rel <= 0.03,
                           fmt("n=%d h=%g t=%.4f: mean radius %.6f vs %.6f (%.3f%%, limit 2%%); area %.6f vs %.6f "
                               "(%.3f%%, limit 3%%)",
                               s.grid.n, s.flow.h, last.time, r, expect, 100.0 * rel, last.diag.area, area_expect,
                               100.0 * area_rel),
                           0.0};
    });
}

CheckResult one_step_radius(const Options& o) {
    return timed([&] {
        const int n = o.quick ? 128 : 256;
        const Grid2 g = Grid2::unit_square(n);
        const double r0 = 0.3;
        const double h = 1e-3;
        const Point c{0.5, 0.5};
        const ScalarField d = redistance(ScalarField::sample(g, [&](Point p) { return norm(p - c) - r0; }));
        FlowConfig cfg;
        cfg.h = h;
        cfg.T = h;
        cfg.prox.exec = o.exec;
        const StepOutput out = step(d, ObstacleSpec::unconstrained(), cfg);
        const double expect = 0.5 * (r0 + std::sqrt(r0 * r0 - 4.0 * h));
        const double r = mean_radius(extract_contour(*out.field), c);
        const double limit = std::max(0.01 * expect, 2.0 * g.spacing());
        return CheckResult{"one-step radius", std::abs(r - expect) <= limit,
                           fmt("n=%d h=%g: radius %.6f vs %.6f, error %.2e (limit %.2e), %d iterations", n, h, r,
                               expect, std::abs(r - expect), limit, out.prox.iterations),
                           0.0};
    });
}

CheckResult strip_stationary(const Options& o) {
    return timed([&] {
        Scenario s = preset("strip");
        if (o.quick) s.grid.n = 64;
        const FlowTrajectory traj = run_or_throw(s);
        const Contour c0 = extract_contour(*traj.states.front().field);
        double worst = 0.0;
        for (const auto& st : traj.states) worst = std::max(worst, hausdorff(c0, extract_contour(*st.field)));
        const double s_ = traj.grid.spacing();
        return CheckResult{"flat strip stationary", worst <= s_ && !traj.extinction_step,
                           fmt("%zu states, max front motion %.3e (limit one cell %.3e)", traj.states.size(), worst,
                               s_),
                           0.0};
    });
}

CheckResult step_set_monotonicity(const Options& o) {
    return timed([&] {
        std::mt19937_64 rng(o.seed + 4);
        const int pairs = o.quick ? 5 : 50;
        const Grid2 g = Grid2::unit_square(64);
        std::uniform_real_distribution<double> amp(-0.04, 0.04);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
        FlowConfig cfg;
        cfg.h = 2e-3;
        cfg.T = cfg.h;
        cfg.prox.exec = o.exec;
        int fail = 0;
        std::size_t worst = 0;
        std::size_t ambiguous = 0;
        for (int t = 0; t < pairs; ++t) {
            double a[4];
            double ph[4];
            for (int k = 0; k < 4; ++k) {
                a[k] = amp(rng);
                ph[k] = phase(rng);
            }
            const auto shrink = random_bumps(rng, 3, 0.08, true, 0.25, 0.75, 0.1, 0.25);
            auto blob = [&](Point p) {
                const double th = std::atan2(p.y - 0.5, p.x - 0.5);
                double r = 0.28;
                for (int k = 0; k < 4; ++k) r += a[k] * std::cos((k + 2) * th + ph[k]);
                return norm(p - Point{0.5, 0.5}) - r;
            };
            const ScalarField big = redistance(ScalarField::sample(g, blob));
            const ScalarField small =
                redistance(ScalarField::sample(g, [&](Point p) { return blob(p) + eval_bumps(shrink, p); }));
            if (!RegionMask::sublevel(small).subset_of(RegionMask::sublevel(big))) continue;
            const StepOutput s1 = step(small, ObstacleSpec::unconstrained(), cfg);
            const StepOutput s2 = step(big, ObstacleSpec::unconstrained(), cfg);
            const std::size_t bad = excess_cells(s1.mask, s2.mask, &s1.ambiguous, &s2.ambiguous);
            ambiguous += s1.ambiguous.count() + s2.ambiguous.count();
            worst = std::max(worst, bad);
            if (bad > 0) ++fail;
        }
        return CheckResult{"step monotone under inclusion", fail == 0,
                           fmt("%d/%d nested pairs violate T(E1) in T(E2) outside ambiguous cells; worst %zu cells; "
                               "%zu ambiguous cells total",
                               fail, pairs, worst, ambiguous),
                           0.0};
    });
}

CheckResult obstacle_inclusion(const Options& o) {
    return timed([&] {
        const Scenario con = dumbbell(o, 20, Variant::Obstacle);
        const Scenario free = dumbbell(o, 20, Variant::Unconstrained);
        const FlowTrajectory a = run_or_throw(con);
        const FlowTrajectory b = run_or_throw(free);
        const RegionMask& omega = *a.omega;
        std::size_t outside_omega = 0;
        std::size_t not_included = 0;
        const std::size_t steps = std::min(a.states.size(), b.states.size());
        for (std::size_t n = 0; n < steps; ++n) {
            outside_omega += excess_cells(a.states[n].mask, omega);
            not_included += excess_cells(a.states[n].mask, b.states[n].mask, &a.states[n].ambiguous, &b.states[n].ambiguous);
        }
        for (std::size_t n = steps; n < a.states.size(); ++n) outside_omega += excess_cells(a.states[n].mask, omega);
        return CheckResult{"obstacle inclusion", outside_omega == 0 && not_included == 0,
                           fmt("%zu steps: %zu cells outside Omega, %zu constrained cells outside the unconstrained "
                               "set (ambiguous excluded)",
                               steps - 1, outside_omega, not_included),
                           0.0};
    });
}

CheckResult one_step_closeness_bound(const Options& o) {
    return timed([&] {
        const int n = o.quick ? 128 : 256;
        const Grid2 g = Grid2::unit_square(n);
        const ScalarField d = redistance(ScalarField::sample(g, [](Point p) {
            const double th = std::atan2(p.y - 0.5, p.x - 0.5);
            return norm(p - Point{0.5, 0.5}) - 0.25 * (1.0 + 0.12 * std::cos(3.0 * th));
        }));
        const double delta = delta_ball_estimate(d);
        const double h = (0.5 * delta) * (0.5 * delta) / 6.0;
        ProxParams p;
        p.h = h;
        p.exec = o.exec;
        const ProxResult r = tv_prox(d, ObstacleSpec::unconstrained(), p);
        const OneStepBound b = one_step_bound(d, r.u, h);
        return CheckResult{"one-step closeness bound", b.holds() && r.converged,
                           fmt("delta_E %.4f, h %.3e: max |u - d_E| on |d_E| <= delta' is %.4e, bound %.4e",
                               b.delta_E, h, b.max_deviation, b.bound),
                           0.0};
    });
}

CheckResult forcing_equivalence(const Options& o) {
    return timed([&] {
        Scenario s = preset("disk_in_box");
        if (o.quick) {
            s.grid.n = 64;
            s.flow.T = 11.0 * s.flow.h;
        }
        s.flow.variant = Variant::Obstacle;
        const FlowTrajectory a = run_or_throw(s);
        s.flow.variant = Variant::Forcing;
        const FlowTrajectory b = run_or_throw(s);
        std::size_t diff = 0;
        std::size_t steps = std::min(a.states.size(), b.states.size());
        for (std::size_t n = 0; n < steps; ++n) {
            diff += excess_cells(a.states[n].mask, b.states[n].mask, &a.states[n].ambiguous, &b.states[n].ambiguous);
            diff += excess_cells(b.states[n].mask, a.states[n].mask, &a.states[n].ambiguous, &b.states[n].ambiguous);
        }
        const bool same_length = a.states.size() == b.states.size();
        return CheckResult{"forcing equivalence", diff == 0 && same_length && steps >= 11,
                           fmt("n=%d, %zu steps, C=%.3f: %zu differing cells outside ambiguous ones", s.grid.n,
                               steps - 1, b.forcing_C, diff),
                           0.0};
    });
}

std::vector<CheckResult> pcf_equality_and_nesting(const Options& o) {
    const auto t0 = Clock::now();
    const FlowTrajectory a = run_or_throw(dumbbell(o, 20, Variant::PcfFrozen));
    const FlowTrajectory b = run_or_throw(dumbbell(o, 20, Variant::PcfRefresh));
    const std::size_t steps = std::min(a.states.size(), b.states.size());
    std::size_t diff = 0;
    std::size_t worst_step_diff = 0;
    std::size_t amb = 0;
    std::size_t front = 0;
    double worst_u = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
        const auto& sa = a.states[n];
        const auto& sb = b.states[n];
        const std::size_t d = excess_cells(sa.mask, sb.mask, &sa.ambiguous, &sb.ambiguous) +
                              excess_cells(sb.mask, sa.mask, &sa.ambiguous, &sb.ambiguous);
        diff += d;
        worst_step_diff = std::max(worst_step_diff, d);
        if (d > 0 && sa.field && sb.field) {
            for (std::size_t k = 0; k < sa.mask.size(); ++k) {
                if (sa.mask[k] != sb.mask[k]) {
                    worst_u = std::max({worst_u, std::abs((*sa.field)[k]), std::abs((*sb.field)[k])});
                }
            }
        }
        RegionMask either(sa.ambiguous.grid());
        for (std::size_t k = 0; k < either.size(); ++k) either.set(k, sa.ambiguous[k] || sb.ambiguous[k]);
        amb += either.count();
        front += front_cells(sa.mask);
    }
    const double amb_frac = front ? static_cast<double>(amb) / static_cast<double>(front) : 0.0;
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    CheckResult eq{"pcf frozen equals refresh", diff == 0 && amb_frac < 1e-3 && a.states.size() == b.states.size(),
                   fmt("%zu steps: %zu differing cells outside ambiguous ones (worst step %zu, largest |d| at a "
                       "differing cell %.2e); ambiguous %.4f%% of front cells",
                       steps - 1, diff, worst_step_diff, worst_u, 100.0 * amb_frac),
                   secs};

    std::size_t violations = 0;
    for (const auto* t : {&a, &b}) {
        for (std::size_t n = 1; n < t->states.size(); ++n) {
            violations += excess_cells(t->states[n].mask, t->states[n - 1].mask);
        }
    }
    CheckResult nest{"pcf nesting", violations == 0,
                     fmt("%zu cells of a later mask outside an earlier one (both variants, all steps)", violations),
                     0.0};
    return {eq, nest};
}

CheckResult pinned_neck(const Options& o) {
    return timed([&] {
        const Scenario s = dumbbell(o, 50, Variant::PcfFrozen);
        const FlowTrajectory traj = run_or_throw(s);
        const double sp = traj.grid.spacing();
        const ScalarField& d0 = *traj.omega_field;
        const Point c1 = s.initial.c1;
        const Point c2 = s.initial.c2;
        const double mid = 0.5 * (c1.x + c2.x);
        // Neck region: between the two disks, junction corners included.
        const double neck_half = 0.5 * (c2.x - c1.x) - std::sqrt(std::max(
            s.initial.radius * s.initial.radius - 0.25 * s.initial.neck_width * s.initial.neck_width, 0.0)) + 2.0 * sp;
        const Contour f0 = extract_contour(d0);
        double left0 = 1e300;
        double right0 = -1e300;
        for (const auto& pl : f0.polylines) {
            for (const auto& p : pl.points) {
                left0 = std::min(left0, p.x);
                right0 = std::max(right0, p.x);
            }
        }
        double outward = 0.0;
        double recede = 1e300;
        for (const auto& st : traj.states) {
            if (!st.field) continue;
            const Contour f = extract_contour(*st.field);
            double left = 1e300;
            double right = -1e300;
            for (const auto& pl : f.polylines) {
                for (const auto& p : pl.points) {
                    left = std::min(left, p.x);
                    right = std::max(right, p.x);
                    if (std::abs(p.x - mid) <= neck_half) outward = std::max(outward, d0.interpolate(p));
                }
            }
            recede = std::min(left - left0, right0 - right);
        }
        const bool ok = outward <= sp && recede >= 5.0 * sp && !traj.extinction_step;
        return CheckResult{"pinned neck", ok,
                           fmt("%zu steps: neck outward motion %.3f cells (limit 1), cap recession %.2f cells "
                               "(need >= 5)",
                               traj.states.size() - 1, outward / sp, recede / sp),
                           0.0};
    });
}

CheckResult convergence(const Options& o) {
    return timed([&] {
        Scenario s = preset("disk");
        std::vector<double> hs{4e-4, 2e-4, 1e-4};
        std::vector<int> ns{64, 128, 256};
        std::vector<double> neg_h{1e-4, 1e-5, 1e-6};
        std::vector<int> neg_n{64, 64, 64};
        double neg_T = 0.002;
        if (o.quick) {
            s.flow.T = 0.01;
            ns = {32, 64, 128};
            neg_h = {1e-4, 1e-5};
            neg_n = {32, 32};
            neg_T = 0.001;
        }
        const ConvergenceReport main = convergence_study(s, hs, ns);
        Scenario neg = s;
        neg.flow.T = neg_T;
        const ConvergenceReport ctl = convergence_study(neg, neg_h, neg_n);
        std::ostringstream os;
        os << "radius errors";
        for (const auto& l : main.levels) os << fmt(" %.3e", l.radius_error);
        os << ", hausdorff";
        for (const auto& l : main.levels) os << fmt(" %.3e", l.hausdorff_error);
        os << "; control (n=" << neg_n.front() << ") errors";
        for (const auto& l : ctl.levels) os << fmt(" %.3e", l.radius_error);
        const auto& e = ctl.levels;
        const bool plateau = e.back().radius_error >= 0.9 * e[e.size() - 2].radius_error;
        const bool flagged = std::all_of(e.begin(), e.end(), [](const ConvergenceLevel& l) { return l.pinning; });
        os << (flagged ? ", pinning flagged" : ", pinning not flagged") << (plateau ? ", plateau" : ", still decreasing");
        const bool ok = main.strictly_decreasing() && main.hausdorff_decreasing() && flagged && plateau;
        return CheckResult{"convergence study", ok, os.str(), 0.0};
    });
}

CheckResult tolerance_stability(const Options& o) {
    return timed([&] {
        Scenario a = dumbbell(o, 20, Variant::Obstacle);
        Scenario b = a;
        b.flow.prox.tol = a.flow.prox.tol / 10.0;
        a.flow.keep_fields = b.flow.keep_fields = true;
        const FlowTrajectory ta = run_or_throw(a);
        const FlowTrajectory tb = run_or_throw(b);
        double worst = 0.0;
        const std::size_t steps = std::min(ta.states.size(), tb.states.size());
        for (std::size_t n = 0; n < steps; ++n) {
            worst = std::max(worst, hausdorff(extract_contour(*ta.states[n].field), extract_contour(*tb.states[n].field)));
        }
        const double sp = ta.grid.spacing();
        return CheckResult{"tolerance stability", worst <= 2.0 * sp && ta.states.size() == tb.states.size(),
                           fmt("tol %.0e vs %.0e over %zu steps: max Hausdorff %.3e (limit %.3e)", a.flow.prox.tol,
                               b.flow.prox.tol, steps - 1, worst, 2.0 * sp),
                           0.0};
    });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"prox_properties", "scheme_properties", "disk_law",
                                                "pcf_equality",    "forcing_equivalence", "convergence"};
    return names;
}

std::vector<CheckResult> run_suite(const std::string& name, const Options& o) {
    std::vector<CheckResult> out;
    auto add = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
    if (name == "prox_properties") {
        add(prox_monotonicity_and_bound(o));
        out.push_back(prox_lipschitz(o));
        out.push_back(prox_translation(o));
        out.push_back(prox_deep_obstacle(o));
    } else if (name == "scheme_properties") {
        out.push_back(one_step_radius(o));
        out.push_back(strip_stationary(o));
        out.push_back(step_set_monotonicity(o));
        out.push_back(obstacle_inclusion(o));
        out.push_back(one_step_closeness_bound(o));
        out.push_back(tolerance_stability(o));
    } else if (name == "disk_law") {
        out.push_back(disk_law(o));
    } else if (name == "pcf_equality") {
        add(pcf_equality_and_nesting(o));
        out.push_back(pinned_neck(o));
    } else if (name == "forcing_equivalence") {
        out.push_back(forcing_equivalence(o));
    } else if (name == "convergence") {
        out.push_back(convergence(o));
    } else {
        throw InvalidArgument("unknown suite '" + name + "'");
    }
    return out;
}

}  // namespace mcfobs::verify
