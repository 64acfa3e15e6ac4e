#include "mcfobs/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "mcfobs/distance.hpp"
#include "mcfobs/geometry.hpp"

namespace mcfobs {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t k = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

std::vector<std::uint64_t> pack(const RegionMask& m) {
    std::vector<std::uint64_t> bits((m.size() + 63) / 64, 0);
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k]) bits[k / 64] |= std::uint64_t{1} << (k % 64);
    }
    return bits;
}

}  // namespace

namespace {

// Menger curvature of contour points `scale` apart in arc length, at every
// vertex of the polyline.
double max_scaled_curvature(const Polyline& pl, double scale) {
    const auto& pts = pl.points;
    const std::size_t n = pts.size();
    if (n < 3) return 0.0;
    std::vector<double> arc(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) arc[k] = arc[k - 1] + norm(pts[k] - pts[k - 1]);
    const double total = arc.back();
    if (!(total > 0.0)) return 0.0;
    if (pl.closed) scale = std::min(scale, total / 3.0);
    auto at = [&](double t) {
        if (pl.closed) t -= total * std::floor(t / total);
        const auto it = std::upper_bound(arc.begin(), arc.end(), t);
        const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(it - arc.begin()), n - 1);
        const std::size_t a = b - 1;
        const double len = arc[b] - arc[a];
        const double w = len > 0.0 ? (t - arc[a]) / len : 0.0;
        return pts[a] + w * (pts[b] - pts[a]);
    };
    double kmax = 0.0;
    const std::size_t last = pl.closed ? n - 1 : n;
    for (std::size_t k = 0; k < last; ++k) {
        const double t = arc[k];
        if (!pl.closed && (t < scale || t > total - scale)) continue;
        const Point a = at(t - scale);
        const Point b = pts[k];
        const Point c = at(t + scale);
        const Point ab = b - a;
        const Point ac = c - a;
        const double denom = norm(ab) * norm(c - b) * norm(ac);
        if (denom > 0.0) kmax = std::max(kmax, 2.0 * std::abs(ab.x * ac.y - ab.y * ac.x) / denom);
    }
    return kmax;
}

// Largest r (in cells, to 1/8 cell) such that opening the mask, and its
// complement, by lattice balls of radius r moves no sample more than one
// cell. Lattice balls cannot follow a front exactly, so strict
// invariance fails for nearly every r.
double regular_radius(const RegionMask& mask) {
    const Grid2& g = mask.grid();
    RegionMask comp(g);
    for (std::size_t k = 0; k < g.size(); ++k) comp.set(k, !mask[k]);
    const auto to_comp = squared_distance_transform(comp);
    const auto to_mask = squared_distance_transform(mask);
    auto open_keeps = [&](const RegionMask& set, const std::vector<double>& to_other, double r2) {
        RegionMask eroded(g);
        for (std::size_t k = 0; k < g.size(); ++k) eroded.set(k, to_other[k] > r2);
        const auto to_eroded = squared_distance_transform(eroded);
        RegionMask opened(g);
        for (std::size_t k = 0; k < g.size(); ++k) opened.set(k, to_eroded[k] <= r2);
        const auto to_opened = squared_distance_transform(opened);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (set[k] && !(to_opened[k] <= 1.0)) return false;
        }
        return true;
    };
    auto regular = [&](double r) {
        const double r2 = r * r * (1.0 + 1e-12);
        return open_keeps(mask, to_comp, r2) && open_keeps(comp, to_mask, r2);
    };
    double lo = 0.5;
    if (!regular(lo)) return 0.0;
    double hi = static_cast<double>(std::max(g.nx(), g.ny()));
    if (regular(hi)) return hi;
    while (hi - lo > 0.125) {
        const double mid = 0.5 * (lo + hi);
        (regular(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

double delta_ball_estimate(const ScalarField& d) {
    const Contour front = extract_contour(d);
    if (front.empty()) throw UndefinedDistance();
    double best = d.grid().diameter();
    // Six cells of arc average out the staircase of mask-derived fronts.
    const double scale = 6.0 * d.grid().spacing();
    double kmax = 0.0;
    for (const auto& pl : front.polylines) kmax = std::max(kmax, max_scaled_curvature(pl, scale));
    if (kmax > 0.0) {
        // Staircase fronts from masks still bias the curvature high. The ball
        // test on the sublevel mask can overshoot by a few cells where the
        // one-cell slack hides trimmed corners, hence the 2-cell deduction.
        const double morph = (regular_radius(RegionMask::sublevel(d)) - 2.0) * d.grid().spacing();
        best = std::min(best, std::max(1.0 / kmax, morph));
    }
    const std::size_t np = front.polylines.size();
    for (std::size_t a = 0; a < np; ++a) {
        Contour ca;
        ca.polylines.push_back(front.polylines[a]);
        const SegmentIndex ia(ca);
        for (std::size_t b = a + 1; b < np; ++b) {
            double gap = std::numeric_limits<double>::infinity();
            for (const auto& p : front.polylines[b].points) gap = std::min(gap, ia.distance(p));
            best = std::min(best, 0.5 * gap);
        }
    }
    return best;
}

ResidualReport pde_residual(const FlowTrajectory& traj, const std::optional<RegionMask>& omega) {
    if (traj.states.size() < 3) throw InvalidArgument("pde_residual needs at least 3 states");
    const Grid2& g = traj.grid;
    const double s = g.spacing();
    const double h = traj.h;
    std::optional<ScalarField> d_omega;
    if (omega) d_omega = signed_distance(*omega);
    else if (traj.omega_field) d_omega = traj.omega_field;

    ResidualReport rep;
    for (std::size_t n = 0; n + 1 < traj.states.size(); ++n) {
        const auto& a = traj.states[n];
        const auto& b = traj.states[n + 1];
        if (!a.field || !b.field) throw InvalidArgument("pde_residual needs a trajectory with kept fields");
        if (traj.extinction_step && static_cast<int>(n + 1) >= *traj.extinction_step) break;
        const ScalarField& dn = *a.field;
        const ScalarField& dm = *b.field;

        bool closed_near_boundary = false;
        for (const auto& pl : extract_contour(dn).polylines) {
            if (!pl.closed) continue;
            for (const auto& p : pl.points) {
                const double m = std::min({p.x - g.domain_min().x, g.domain_max().x - p.x, p.y - g.domain_min().y,
                                           g.domain_max().y - p.y});
                if (m < 6.0 * s) closed_near_boundary = true;
            }
        }
        if (closed_near_boundary) {
            throw InvalidArgument("pde_residual: band touches the grid boundary at step " + std::to_string(n));
        }

        ResidualRow row;
        row.step = static_cast<int>(n);
        row.time = a.time;
        std::vector<double> off;
        std::vector<double> dt_contact;
        double band_max = 0.0;
        row.contact_min_residual = std::numeric_limits<double>::infinity();
        row.contact_max_laplacian = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const double v = dn(i, j);
                if (std::abs(v) > 5.0 * s) continue;
                // Mirror (zero-flux) ghosts at the grid edge; only open fronts reach it.
                const double xm = dn(i > 0 ? i - 1 : i + 1, j);
                const double xp = dn(i + 1 < g.nx() ? i + 1 : i - 1, j);
                const double ym = dn(i, j > 0 ? j - 1 : j + 1);
                const double yp = dn(i, j + 1 < g.ny() ? j + 1 : j - 1);
                const double lap = (xm + xp + ym + yp - 4.0 * v) / (s * s);
                const double dt = (dm(i, j) - v) / h;
                const double r = dt - lap;
                band_max = std::max(band_max, std::abs(v));
                if (d_omega && std::abs(v - (*d_omega)(i, j)) < 2.0 * s) {
                    ++row.contact_samples;
                    row.contact_min_residual = std::min(row.contact_min_residual, r);
                    row.contact_max_laplacian = std::max(row.contact_max_laplacian, lap);
                    dt_contact.push_back(std::abs(dt));
                } else {
                    off.push_back(std::abs(r));
                }
            }
        }
        row.off_contact_samples = off.size();
        row.off_contact_median_abs = median(off);
        row.off_contact_max_abs = off.empty() ? 0.0 : *std::max_element(off.begin(), off.end());
        row.contact_median_abs_dt = median(dt_contact);
        if (row.contact_samples == 0) {
            row.contact_min_residual = 0.0;
            row.contact_max_laplacian = 0.0;
        }
        const double delta = a.diag.delta_ball > 0.0 ? a.diag.delta_ball : g.diameter();
        row.tolerance = band_max / (delta * delta);
        rep.rows.push_back(row);
    }
    return rep;
}

double holder_quotient(const FlowTrajectory& traj) {
    const std::size_t n = traj.states.size();
    if (n < 2) return 0.0;
    std::vector<std::vector<std::uint64_t>> bits;
    bits.reserve(n);
    for (const auto& s : traj.states) bits.push_back(pack(s.mask));
    const double cell = traj.grid.cell_area();
    double best = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double dt = traj.states[b].time - traj.states[a].time;
            if (dt <= 0.0 || dt > 1.0) continue;
            std::size_t count = 0;
            for (std::size_t w = 0; w < bits[a].size(); ++w) count += static_cast<std::size_t>(std::popcount(bits[a][w] ^ bits[b][w]));
            best = std::max(best, static_cast<double>(count) * cell / std::cbrt(dt));
        }
    }
    return best;
}

OneStepBound one_step_bound(const ScalarField& d_E, const ScalarField& u, double h) {
    require_same_grid(d_E.grid(), u.grid());
    OneStepBound b;
    b.delta_E = delta_ball_estimate(d_E);
    b.delta_prime = 0.5 * b.delta_E;
    b.h = h;
    for (std::size_t k = 0; k < d_E.size(); ++k) {
        if (std::abs(d_E[k]) <= b.delta_prime) b.max_deviation = std::max(b.max_deviation, std::abs(u[k] - d_E[k]));
    }
    b.bound = h / (b.delta_E - b.delta_prime) + 2.0 * d_E.grid().spacing();
    return b;
}

double domain_growth_difference(const RegionMask& E, const std::optional<RegionMask>& omega, const FlowConfig& cfg,
                                double growth) {
    const Grid2& g = E.grid();
    const int px = static_cast<int>(std::ceil(0.5 * growth * g.nx()));
    const int py = static_cast<int>(std::ceil(0.5 * growth * g.ny()));
    const Grid2 big(g.nx() + 2 * px, g.ny() + 2 * py, g.spacing(),
                    {g.origin().x - px * g.spacing(), g.origin().y - py * g.spacing()});
    auto embed = [&](const RegionMask& m) {
        RegionMask out(big);
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) out.set(i + px, j + py, m(i, j));
        }
        return out;
    };
    ProxParams p = cfg.prox;
    p.h = cfg.h;
    const DistanceCap cap{cfg.cap.resolve(big)};
    auto solve = [&](const RegionMask& e, const std::optional<RegionMask>& o) {
        const ScalarField d = signed_distance(e, cap);
        const ObstacleSpec ob = o ? ObstacleSpec::constrained(signed_distance(*o, cap)) : ObstacleSpec::unconstrained();
        return tv_prox(d, ob, p).u;
    };
    const ScalarField small = solve(E, omega);
    const ScalarField large = solve(embed(E), omega ? std::optional<RegionMask>(embed(*omega)) : std::nullopt);
    double diff = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) diff = std::max(diff, std::abs(small(i, j) - large(i + px, j + py)));
    }
    return diff;
}

bool ConvergenceReport::strictly_decreasing() const {
    for (std::size_t k = 1; k < levels.size(); ++k) {
        if (!(levels[k].radius_error < levels[k - 1].radius_error)) return false;
    }
    return levels.size() >= 2;
}

bool ConvergenceReport::hausdorff_decreasing() const {
    for (std::size_t k = 1; k < levels.size(); ++k) {
        if (!(levels[k].hausdorff_error < levels[k - 1].hausdorff_error)) return false;
    }
    return levels.size() >= 2;
}

bool ConvergenceReport::pinning_flagged() const {
    return std::any_of(levels.begin(), levels.end(), [](const ConvergenceLevel& l) { return l.pinning; });
}

ConvergenceReport convergence_study(const Scenario& base, const std::vector<double>& h_list,
                                    const std::vector<int>& n_list) {
    if (h_list.size() != n_list.size() || h_list.empty()) {
        throw InvalidArgument("convergence_study: h and grid lists must have the same nonzero length");
    }
    const std::string& kind = base.initial.kind;
    if (kind != "disk" && kind != "strip") throw InvalidArgument("convergence_study needs a disk or strip scenario");
    if (base.obstacle.kind != "none" || base.flow.variant == Variant::Obstacle ||
        base.flow.variant == Variant::Forcing) {
        throw InvalidArgument("convergence_study needs an unobstructed scenario");
    }
    ConvergenceReport rep;
    for (std::size_t lv = 0; lv < h_list.size(); ++lv) {
        Scenario sc = base;
        sc.grid.n = n_list[lv];
        sc.flow.h = h_list[lv];
        sc.flow.keep_fields = false;
        const Grid2 g = sc.grid.make();
        ConvergenceLevel row;
        row.h = sc.flow.h;
        row.n = sc.grid.n;
        row.spacing = g.spacing();
        row.pinning = pinning_regime(row.h, row.spacing);
        FlowTrajectory traj{g, row.h, sc.flow.variant, {}, std::nullopt, {}, std::nullopt, std::nullopt, 0.0};
        try {
            traj = run_scenario(sc);
        } catch (const NonConvergence& e) {
            throw ConvergenceAborted(static_cast<int>(lv), e.what());
        }
        if (traj.extinction_step) throw ConvergenceAborted(static_cast<int>(lv), "set vanished before T");
        row.steps = traj.states.back().step;
        const ScalarField& d = *traj.states.back().field;
        const Contour front = extract_contour(d);
        const double t_end = traj.states.back().time;
        const double s = g.spacing();
        if (kind == "disk") {
            const double r0 = base.initial.radius;
            row.reference_radius = std::sqrt(std::max(r0 * r0 - 2.0 * t_end, 0.0));
            row.radius = mean_radius(front, base.initial.center);
            Contour ref;
            Polyline circle;
            circle.closed = true;
            const int m = std::max(64, static_cast<int>(std::ceil(2.0 * M_PI * row.reference_radius / (0.05 * s))));
            for (int k = 0; k <= m; ++k) {
                const double a = 2.0 * M_PI * (k % m) / m;
                circle.points.push_back(
                    base.initial.center + row.reference_radius * Point{std::cos(a), std::sin(a)});
            }
            ref.polylines.push_back(std::move(circle));
            row.hausdorff_error = hausdorff(front, ref);
        } else {
            // Straight fronts are stationary: compare against the initial lines.
            const double cy = base.initial.center.y;
            const double hw = base.initial.half_width;
            double worst = 0.0;
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& pl : front.polylines) {
                for (const auto& p : pl.points) {
                    const double e = std::abs(std::abs(p.y - cy) - hw);
                    worst = std::max(worst, e);
                    sum += e;
                    ++count;
                }
            }
            row.reference_radius = hw;
            row.radius = count ? hw + sum / static_cast<double>(count) : 0.0;
            row.hausdorff_error = worst;
        }
        row.radius_error = std::abs(row.radius - row.reference_radius);
        rep.levels.push_back(row);
    }
    return rep;
}

}  // namespace mcfobs
