#include <vector>

#include "kernel_ops.hpp"

namespace mcfobs::kernels {

namespace parallel {

void dual_ascent(Shape sh, const double* ubar, double* px, double* py, double sigma) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < sh.ny; ++j) {
        for (int i = 0; i < sh.nx; ++i) ops::dual_cell(sh, ubar, px, py, sigma, i, j);
    }
}

void primal_descent(Shape sh, double* u, double* ubar, const double* px, const double* py, const double* f,
                    const double* v, double tau, double h, double theta) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < sh.ny; ++j) {
        for (int i = 0; i < sh.nx; ++i) ops::primal_cell(sh, u, ubar, px, py, f, v, tau, h, theta, i, j);
    }
}

double tv_sum(Shape sh, const double* u) {
    std::vector<double> rows(static_cast<std::size_t>(sh.ny));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < sh.ny; ++j) {
        double row = 0.0;
        for (int i = 0; i < sh.nx; ++i) row += ops::tv_cell(sh, u, i, j);
        rows[static_cast<std::size_t>(j)] = row;
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total;
}

double squared_distance(Shape sh, const double* u, const double* f) {
    std::vector<double> rows(static_cast<std::size_t>(sh.ny));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < sh.ny; ++j) {
        double row = 0.0;
        for (int i = 0; i < sh.nx; ++i) {
            const double e = u[ops::at(sh, i, j)] - f[ops::at(sh, i, j)];
            row += e * e;
        }
        rows[static_cast<std::size_t>(j)] = row;
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total;
}

DualSums dual_terms(Shape sh, const double* px, const double* py, const double* f, const double* v, double h, double* w) {
    std::vector<double> fid_rows(static_cast<std::size_t>(sh.ny));
    std::vector<double> coup_rows(static_cast<std::size_t>(sh.ny));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < sh.ny; ++j) {
        double fid = 0.0;
        double coup = 0.0;
        for (int i = 0; i < sh.nx; ++i) ops::dual_terms_cell(sh, px, py, f, v, h, w, i, j, fid, coup);
        fid_rows[static_cast<std::size_t>(j)] = fid;
        coup_rows[static_cast<std::size_t>(j)] = coup;
    }
    DualSums out;
    for (std::size_t j = 0; j < fid_rows.size(); ++j) {
        out.fidelity += fid_rows[j];
        out.coupling += coup_rows[j];
    }
    return out;
}

}  // namespace parallel

void dual_ascent(Exec ex, Shape sh, const double* ubar, double* px, double* py, double sigma) {
    if (ex == Exec::Parallel) parallel::dual_ascent(sh, ubar, px, py, sigma);
    else serial::dual_ascent(sh, ubar, px, py, sigma);
}

void primal_descent(Exec ex, Shape sh, double* u, double* ubar, const double* px, const double* py, const double* f,
                    const double* v, double tau, double h, double theta) {
    if (ex == Exec::Parallel) parallel::primal_descent(sh, u, ubar, px, py, f, v, tau, h, theta);
    else serial::primal_descent(sh, u, ubar, px, py, f, v, tau, h, theta);
}

double tv_sum(Exec ex, Shape sh, const double* u) {
    return ex == Exec::Parallel ? parallel::tv_sum(sh, u) : serial::tv_sum(sh, u);
}

double squared_distance(Exec ex, Shape sh, const double* u, const double* f) {
    return ex == Exec::Parallel ? parallel::squared_distance(sh, u, f) : serial::squared_distance(sh, u, f);
}

DualSums dual_terms(Exec ex, Shape sh, const double* px, const double* py, const double* f, const double* v, double h,
                    double* w) {
    return ex == Exec::Parallel ? parallel::dual_terms(sh, px, py, f, v, h, w) : serial::dual_terms(sh, px, py, f, v, h, w);
}

}  // namespace mcfobs::kernels
