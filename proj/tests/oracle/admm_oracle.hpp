#pragma once

// Independent reference for the obstacle TV-L2 problem on small grids:
// ADMM on the splitting g = Du, w = u, with the u-update solved by a dense
// Cholesky factorization. Shares no code with the library solver.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct Problem {
    int nx = 0;
    int ny = 0;
    double spacing = 1.0;
    double h = 1.0;
    std::vector<double> f;
    std::vector<double> v;  // empty: no obstacle
};

// sum |(u[i+1]-u[i], u[j+1]-u[i])| spacing + spacing^2/(2h) sum (u-f)^2,
// differences set to zero across the last column / row.
inline double energy(const Problem& p, const std::vector<double>& u) {
    double tv = 0.0;
    double fid = 0.0;
    for (int j = 0; j < p.ny; ++j) {
        for (int i = 0; i < p.nx; ++i) {
            const int k = j * p.nx + i;
            const double dx = i + 1 < p.nx ? u[k + 1] - u[k] : 0.0;
            const double dy = j + 1 < p.ny ? u[k + p.nx] - u[k] : 0.0;
            tv += std::sqrt(dx * dx + dy * dy);
            fid += (u[k] - p.f[k]) * (u[k] - p.f[k]);
        }
    }
    return p.spacing * tv + p.spacing * p.spacing / (2.0 * p.h) * fid;
}

inline std::vector<double> solve(const Problem& p, int iterations = 200000) {
    const int n = p.nx * p.ny;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * n, n);
    for (int j = 0; j < p.ny; ++j) {
        for (int i = 0; i < p.nx; ++i) {
            const int k = j * p.nx + i;
            if (i + 1 < p.nx) {
                D(2 * k, k + 1) = 1.0;
                D(2 * k, k) = -1.0;
            }
            if (j + 1 < p.ny) {
                D(2 * k + 1, k + p.nx) = 1.0;
                D(2 * k + 1, k) = -1.0;
            }
        }
    }
    const Eigen::MatrixXd A = D.transpose() * D + Eigen::MatrixXd::Identity(n, n);
    const Eigen::LLT<Eigen::MatrixXd> llt(A);
    const double rho = p.spacing;
    const double a = p.spacing * p.spacing / p.h;
    Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(p.f.data(), n);
    Eigen::VectorXd u = f;
    Eigen::VectorXd w = f;
    if (!p.v.empty()) {
        for (int k = 0; k < n; ++k) w[k] = std::max(w[k], p.v[static_cast<std::size_t>(k)]);
    }
    Eigen::VectorXd g = D * w;
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(2 * n);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    const double shrink = p.spacing / rho;
    for (int it = 0; it < iterations; ++it) {
        u = llt.solve(D.transpose() * (g - lam) + (w - mu));
        const Eigen::VectorXd du = D * u;
        for (int k = 0; k < n; ++k) {
            const double x = du[2 * k] + lam[2 * k];
            const double y = du[2 * k + 1] + lam[2 * k + 1];
            const double r = std::sqrt(x * x + y * y);
            const double s = r > shrink ? 1.0 - shrink / r : 0.0;
            g[2 * k] = s * x;
            g[2 * k + 1] = s * y;
        }
        for (int k = 0; k < n; ++k) {
            double x = (a * f[k] + rho * (u[k] + mu[k])) / (a + rho);
            if (!p.v.empty()) x = std::max(x, p.v[static_cast<std::size_t>(k)]);
            w[k] = x;
        }
        lam += du - g;
        mu += u - w;
    }
    return std::vector<double>(w.data(), w.data() + n);
}

}  // namespace oracle
