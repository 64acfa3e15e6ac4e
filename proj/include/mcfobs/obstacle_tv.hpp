#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "mcfobs/grid.hpp"
#include "mcfobs/kernels.hpp"

namespace mcfobs {

/// Lower bound for the TV solve: a field v, or no bound at all.
class ObstacleSpec {
public:
    static ObstacleSpec unconstrained() { return ObstacleSpec(); }
    static ObstacleSpec constrained(ScalarField v);

    bool is_constrained() const { return v_.has_value(); }
    const ScalarField& field() const;

private:
    ObstacleSpec() = default;
    std::optional<ScalarField> v_;
};

/// Staggered dual variable: zx lives between cells (i, j) and (i+1, j), zy
/// between (i, j) and (i, j+1). Entries on the last column / row are zero.
struct DualField {
    Grid2 grid;
    std::vector<double> zx;
    std::vector<double> zy;

    explicit DualField(const Grid2& g) : grid(g), zx(g.size(), 0.0), zy(g.size(), 0.0) {}
    /// Largest per-cell Euclidean norm of (zx, zy).
    double max_norm() const;
};

struct ProxParams {
    double h = 0.0;
    double tol = 1e-6;
    int max_iter = 20000;
    /// tau0 = step_ratio * spacing / sqrt(8), sigma0 = spacing / (sqrt(8) * step_ratio).
    double step_ratio = 1.0;
    /// Duality gap evaluated every this many iterations (and at iteration 1).
    int check_every = 10;
    kernels::Exec exec = kernels::Exec::Parallel;
    bool record_trace = false;
};

struct TraceRow {
    int iteration;
    double primal_energy;
    double dual_energy;
    double gap;
};

struct ProxResult {
    explicit ProxResult(const Grid2& g) : u(g), z(g) {}

    ScalarField u;
    DualField z;
    double primal_energy = 0.0;
    double dual_energy = 0.0;
    double gap = 0.0;
    /// Gap of the cold start (u = max(f, v), z = 0), the reference for tol.
    double gap_ref = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<TraceRow> trace;
};

/// Minimizes sum |Du| spacing + (1/2h) sum (u - f)^2 spacing^2 subject to
/// u >= v, with forward differences and Neumann boundary. Energies and gaps
/// are reported in these units. Accelerated primal-dual iteration, warm
/// started from the normalized gradient of max(f, v) unless `warm` is given.
/// Throws InvalidArgument on non-finite input or bad parameters.
ProxResult tv_prox(const ScalarField& f, const ObstacleSpec& obstacle, const ProxParams& params,
                   const DualField* warm = nullptr);

/// sum |Du| spacing.
double discrete_tv(const ScalarField& u);
double primal_energy(const ScalarField& u, const ScalarField& f, double h);
/// Dual lower bound for a feasible dual field (|z| <= 1).
double dual_energy(const DualField& z, const ScalarField& f, const ObstacleSpec& obstacle, double h);
/// primal_energy(u) - dual_energy(z). Throws Infeasible when u < v beyond
/// 1e-12 * scale, InvalidArgument when |z| > 1 + 1e-12.
double dual_gap(const ScalarField& u, const DualField& z, const ScalarField& f, const ObstacleSpec& obstacle, double h);

/// f + C h outside omega, f inside.
ScalarField forcing_input(const ScalarField& f, const RegionMask& omega, double C, double h);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

}  // namespace mcfobs
