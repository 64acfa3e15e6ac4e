#pragma once

// Cell-level arithmetic shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "mcfobs/kernels.hpp"

namespace mcfobs::kernels::ops {

inline std::size_t at(const Shape& sh, int i, int j) {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(sh.nx) + static_cast<std::size_t>(i);
}

inline double grad_x(const Shape& sh, const double* u, int i, int j) {
    return i + 1 < sh.nx ? u[at(sh, i + 1, j)] - u[at(sh, i, j)] : 0.0;
}

inline double grad_y(const Shape& sh, const double* u, int i, int j) {
    return j + 1 < sh.ny ? u[at(sh, i, j + 1)] - u[at(sh, i, j)] : 0.0;
}

/// Negative adjoint of the forward difference; raw units.
inline double div(const Shape& sh, const double* px, const double* py, int i, int j) {
    const std::size_t k = at(sh, i, j);
    const double dx = (i + 1 < sh.nx ? px[k] : 0.0) - (i > 0 ? px[k - 1] : 0.0);
    const double dy = (j + 1 < sh.ny ? py[k] : 0.0) -
                      (j > 0 ? py[k - static_cast<std::size_t>(sh.nx)] : 0.0);
    return dx + dy;
}

inline void dual_cell(const Shape& sh, const double* ubar, double* px, double* py, double sigma, int i, int j) {
    const std::size_t k = at(sh, i, j);
    const double s = sigma * sh.inv_spacing;
    const double qx = px[k] + s * grad_x(sh, ubar, i, j);
    const double qy = py[k] + s * grad_y(sh, ubar, i, j);
    const double n = std::max(1.0, std::sqrt(qx * qx + qy * qy));
    px[k] = qx / n;
    py[k] = qy / n;
}

inline void primal_cell(const Shape& sh, double* u, double* ubar, const double* px, const double* py, const double* f,
                        const double* v, double tau, double h, double theta, int i, int j) {
    const std::size_t k = at(sh, i, j);
    const double old = u[k];
    const double g = div(sh, px, py, i, j) * sh.inv_spacing;
    double un = (h * (old + tau * g) + tau * f[k]) / (h + tau);
    if (v) un = std::max(v[k], un);
    u[k] = un;
    ubar[k] = un + theta * (un - old);
}

inline double tv_cell(const Shape& sh, const double* u, int i, int j) {
    const double gx = grad_x(sh, u, i, j);
    const double gy = grad_y(sh, u, i, j);
    return std::sqrt(gx * gx + gy * gy);
}

inline void dual_terms_cell(const Shape& sh, const double* px, const double* py, const double* f, const double* v,
                            double h, double* w, int i, int j, double& fid, double& coup) {
    const std::size_t k = at(sh, i, j);
    const double g = div(sh, px, py, i, j) * sh.inv_spacing;
    double wk = f[k] + h * g;
    if (v) wk = std::max(v[k], wk);
    w[k] = wk;
    const double e = wk - f[k];
    fid += e * e;
    coup += g * wk;
}

}  // namespace mcfobs::kernels::ops
