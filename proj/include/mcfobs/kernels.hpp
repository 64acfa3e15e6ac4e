#pragma once

// Per-iteration kernels of the primal-dual TV solver. Every kernel exists in
// a plain serial form (the reference) and an OpenMP form; both evaluate the
// same expressions in the same order per cell, and reductions are summed row
// by row and then over rows, so the two agree bit for bit.

namespace mcfobs::kernels {

enum class Exec { Serial, Parallel };

struct Shape {
    int nx;
    int ny;
    double inv_spacing;
};

struct DualSums {
    double fidelity = 0.0;  // sum (w - f)^2
    double coupling = 0.0;  // sum div(z) * w, div in scaled units
};

/// p <- proj_{|p| <= 1}(p + sigma * grad(ubar)). Forward differences,
/// zero flux through the last column / row.
void dual_ascent(Exec ex, Shape sh, const double* ubar, double* px, double* py, double sigma);

/// u <- max(v, (h (u + tau div p) + tau f) / (h + tau)), then
/// ubar <- u_new + theta (u_new - u_old). v may be null (no obstacle).
void primal_descent(Exec ex, Shape sh, double* u, double* ubar, const double* px, const double* py, const double* f,
                    const double* v, double tau, double h, double theta);

/// Sum over cells of |grad u| in raw differences (not divided by spacing).
double tv_sum(Exec ex, Shape sh, const double* u);

/// Sum over cells of (u - f)^2.
double squared_distance(Exec ex, Shape sh, const double* u, const double* f);

/// Dual-induced primal point w = max(v, f + h div p) written to `w`, with the
/// sums needed for the dual energy.
DualSums dual_terms(Exec ex, Shape sh, const double* px, const double* py, const double* f, const double* v, double h,
                    double* w);

namespace serial {
void dual_ascent(Shape sh, const double* ubar, double* px, double* py, double sigma);
void primal_descent(Shape sh, double* u, double* ubar, const double* px, const double* py, const double* f,
                    const double* v, double tau, double h, double theta);
double tv_sum(Shape sh, const double* u);
double squared_distance(Shape sh, const double* u, const double* f);
DualSums dual_terms(Shape sh, const double* px, const double* py, const double* f, const double* v, double h, double* w);
}  // namespace serial

namespace parallel {
void dual_ascent(Shape sh, const double* ubar, double* px, double* py, double sigma);
void primal_descent(Shape sh, double* u, double* ubar, const double* px, const double* py, const double* f,
                    const double* v, double tau, double h, double theta);
double tv_sum(Shape sh, const double* u);
double squared_distance(Shape sh, const double* u, const double* f);
DualSums dual_terms(Shape sh, const double* px, const double* py, const double* f, const double* v, double h, double* w);
}  // namespace parallel

}  // namespace mcfobs::kernels
