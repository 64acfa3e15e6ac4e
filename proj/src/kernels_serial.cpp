#include <vector>

#include "kernel_ops.hpp"

namespace mcfobs::kernels::serial {

void dual_ascent(Shape sh, const double* ubar, double* px, double* py, double sigma) {
    for (int j = 0; j < sh.ny; ++j) {
        for (int i = 0; i < sh.nx; ++i) ops::dual_cell(sh, ubar, px, py, sigma, i, j);
    }
}

void primal_descent(Shape sh, double* u, double* ubar, const double* px, const double* py, const double* f,
                    const double* v, double tau, double h, double theta) {
    for (int j = 0; j < sh.ny; ++j) {
        for (int i = 0; i < sh.nx; ++i) ops::primal_cell(sh, u, ubar, px, py, f, v, tau, h, theta, i, j);
    }
}

double tv_sum(Shape sh, const double* u) {
    double total = 0.0;
    for (int j = 0; j < sh.ny; ++j) {
        double row = 0.0;
        for (int i = 0; i < sh.nx; ++i) row += ops::tv_cell(sh, u, i, j);
        total += row;
    }
    return total;
}

double squared_distance(Shape sh, const double* u, const double* f) {
    double total = 0.0;
    for (int j = 0; j < sh.ny; ++j) {
        double row = 0.0;
        for (int i = 0; i < sh.nx; ++i) {
            const double e = u[ops::at(sh, i, j)] - f[ops::at(sh, i, j)];
            row += e * e;
        }
        total += row;
    }
    return total;
}

DualSums dual_terms(Shape sh, const double* px, const double* py, const double* f, const double* v, double h, double* w) {
    DualSums out;
    for (int j = 0; j < sh.ny; ++j) {
        double fid = 0.0;
        double coup = 0.0;
        for (int i = 0; i < sh.nx; ++i) ops::dual_terms_cell(sh, px, py, f, v, h, w, i, j, fid, coup);
        out.fidelity += fid;
        out.coupling += coup;
    }
    return out;
}

}  // namespace mcfobs::kernels::serial
