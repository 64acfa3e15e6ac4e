#include "mcfobs/obstacle_tv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace mcfobs {

namespace {

kernels::Shape shape_of(const Grid2& g) { return {g.nx(), g.ny(), 1.0 / g.spacing()}; }

double scale_of(const ScalarField& f) { return std::max(f.max_abs(), 1.0); }

void check_obstacle(const ScalarField& f, const ObstacleSpec& obstacle) {
    if (!f.all_finite()) throw InvalidArgument("input field has non-finite values");
    if (obstacle.is_constrained()) {
        require_same_grid(f.grid(), obstacle.field().grid());
        if (!obstacle.field().all_finite()) throw InvalidArgument("obstacle field has non-finite values");
    }
}

}  // namespace

ObstacleSpec ObstacleSpec::constrained(ScalarField v) {
    ObstacleSpec o;
    o.v_ = std::move(v);
    return o;
}

const ScalarField& ObstacleSpec::field() const {
    if (!v_) throw InvalidArgument("unconstrained obstacle has no field");
    return *v_;
}

double DualField::max_norm() const {
    double m = 0.0;
    for (std::size_t k = 0; k < zx.size(); ++k) m = std::max(m, std::hypot(zx[k], zy[k]));
    return m;
}

double discrete_tv(const ScalarField& u) {
    return u.grid().spacing() * kernels::serial::tv_sum(shape_of(u.grid()), u.values().data());
}

double primal_energy(const ScalarField& u, const ScalarField& f, double h) {
    require_same_grid(u.grid(), f.grid());
    const double s = u.grid().spacing();
    const auto sh = shape_of(u.grid());
    return s * kernels::serial::tv_sum(sh, u.values().data()) +
           s * s / (2.0 * h) * kernels::serial::squared_distance(sh, u.values().data(), f.values().data());
}

double dual_energy(const DualField& z, const ScalarField& f, const ObstacleSpec& obstacle, double h) {
    require_same_grid(z.grid, f.grid());
    check_obstacle(f, obstacle);
    const double s = f.grid().spacing();
    std::vector<double> w(f.size());
    const double* v = obstacle.is_constrained() ? obstacle.field().values().data() : nullptr;
    const auto sums =
        kernels::serial::dual_terms(shape_of(f.grid()), z.zx.data(), z.zy.data(), f.values().data(), v, h, w.data());
    return s * s * (sums.fidelity / (2.0 * h) - sums.coupling);
}

double dual_gap(const ScalarField& u, const DualField& z, const ScalarField& f, const ObstacleSpec& obstacle,
                double h) {
    if (!(h > 0.0)) throw InvalidArgument("h must be positive");
    require_same_grid(u.grid(), f.grid());
    check_obstacle(f, obstacle);
    if (z.max_norm() > 1.0 + 1e-12) throw InvalidArgument("dual field exceeds unit norm");
    if (obstacle.is_constrained()) {
        const double tol = 1e-12 * scale_of(f);
        const auto& v = obstacle.field();
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (u[k] < v[k] - tol) throw Infeasible("primal iterate violates the obstacle");
        }
    }
    return primal_energy(u, f, h) - dual_energy(z, f, obstacle, h);
}

ProxResult tv_prox(const ScalarField& f, const ObstacleSpec& obstacle, const ProxParams& params,
                   const DualField* warm) {
    const double h = params.h;
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("prox: h must be positive");
    if (!(params.tol > 0.0)) throw InvalidArgument("prox: tol must be positive");
    if (params.max_iter < 1) throw InvalidArgument("prox: max_iter must be at least 1");
    if (!(params.step_ratio > 0.0)) throw InvalidArgument("prox: step_ratio must be positive");
    if (params.check_every < 1) throw InvalidArgument("prox: check_every must be at least 1");
    check_obstacle(f, obstacle);

    const Grid2& g = f.grid();
    const auto sh = shape_of(g);
    const auto ex = params.exec;
    const double s = g.spacing();
    const double* fp = f.values().data();
    const double* vp = obstacle.is_constrained() ? obstacle.field().values().data() : nullptr;

    ProxResult res(g);
    auto u = res.u.values();
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = vp ? std::max(fp[k], vp[k]) : fp[k];
    res.gap_ref = s * kernels::tv_sum(ex, sh, u.data());

    auto& px = res.z.zx;
    auto& py = res.z.zy;
    if (warm) {
        require_same_grid(warm->grid, g);
        px = warm->zx;
        py = warm->zy;
    } else {
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const std::size_t k = g.index(i, j);
                const double gx = i + 1 < g.nx() ? u[k + 1] - u[k] : 0.0;
                const double gy = j + 1 < g.ny() ? u[k + static_cast<std::size_t>(g.nx())] - u[k] : 0.0;
                const double n = std::hypot(gx, gy);
                if (n > 0.0) {
                    px[k] = gx / n;
                    py[k] = gy / n;
                }
            }
        }
    }

    std::vector<double> ubar(u.begin(), u.end());
    std::vector<double> w(g.size());
    const double lip = std::sqrt(8.0) / s;
    double tau = params.step_ratio / lip;
    double sigma = 1.0 / (lip * params.step_ratio);
    const double gamma = 1.0 / h;
    const double floor = 1e-15 * scale_of(f) * g.total_area();

    for (int it = 1; it <= params.max_iter; ++it) {
        kernels::dual_ascent(ex, sh, ubar.data(), px.data(), py.data(), sigma);
        const double theta = 1.0 / std::sqrt(1.0 + 2.0 * gamma * tau);
        kernels::primal_descent(ex, sh, u.data(), ubar.data(), px.data(), py.data(), fp, vp, tau, h, theta);
        tau *= theta;
        sigma /= theta;
        res.iterations = it;

        if (it != 1 && it % params.check_every != 0 && it != params.max_iter) continue;
        const double pu = s * kernels::tv_sum(ex, sh, u.data()) +
                          s * s / (2.0 * h) * kernels::squared_distance(ex, sh, u.data(), fp);
        const auto sums = kernels::dual_terms(ex, sh, px.data(), py.data(), fp, vp, h, w.data());
        const double dual = s * s * (sums.fidelity / (2.0 * h) - sums.coupling);
        const double pw = s * kernels::tv_sum(ex, sh, w.data()) + s * s / (2.0 * h) * sums.fidelity;
        const double primal = std::min(pu, pw);
        const double gap = primal - dual;
        if (params.record_trace) res.trace.push_back({it, primal, dual, gap});
        res.primal_energy = primal;
        res.dual_energy = dual;
        res.gap = gap;
        if (gap <= params.tol * res.gap_ref || gap <= floor) {
            res.converged = true;
            if (pw < pu) std::copy(w.begin(), w.end(), u.begin());
            break;
        }
    }
    if (!res.converged) {
        // Last check ran at max_iter; keep whichever primal point was better.
        const double pu = primal_energy(res.u, f, h);
        if (res.primal_energy < pu) std::copy(w.begin(), w.end(), u.begin());
    }
    return res;
}

ScalarField forcing_input(const ScalarField& f, const RegionMask& omega, double C, double h) {
    require_same_grid(f.grid(), omega.grid());
    if (!(C >= 0.0) || !(h > 0.0)) throw InvalidArgument("forcing_input: need C >= 0 and h > 0");
    ScalarField out = f;
    const double lift = C * h;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!omega[k]) out[k] = f[k] + lift;
    }
    return out;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "iteration,primal_energy,dual_energy,gap\n" << std::setprecision(17);
    for (const auto& r : trace) out << r.iteration << ',' << r.primal_energy << ',' << r.dual_energy << ',' << r.gap << '\n';
}

}  // namespace mcfobs
