#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "../oracle/admm_oracle.hpp"
#include "mcfobs/obstacle_tv.hpp"

using namespace mcfobs;

namespace {

ProxParams params(double h) {
    ProxParams p;
    p.h = h;
    return p;
}

// Projected dual ascent for min sum|Du| + (1/2 lambda) sum (u - f)^2 in raw
// differences (lambda = h / spacing), u = f - lambda div p.
std::vector<double> projected_dual_ascent(const ScalarField& f, double h, int iterations) {
    const Grid2& g = f.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const double lambda = h / g.spacing();
    const double tau = 0.24;
    const std::size_t n = g.size();
    std::vector<double> px(n, 0.0), py(n, 0.0), q(n);
    auto div = [&](int i, int j) {
        const std::size_t k = g.index(i, j);
        return (i < nx - 1 ? px[k] : 0.0) - (i > 0 ? px[k - 1] : 0.0) + (j < ny - 1 ? py[k] : 0.0) -
               (j > 0 ? py[k - static_cast<std::size_t>(nx)] : 0.0);
    };
    for (int it = 0; it < iterations; ++it) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) q[g.index(i, j)] = div(i, j) - f(i, j) / lambda;
        }
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = g.index(i, j);
                const double gx = i < nx - 1 ? q[k + 1] - q[k] : 0.0;
                const double gy = j < ny - 1 ? q[k + static_cast<std::size_t>(nx)] - q[k] : 0.0;
                const double x = px[k] + tau * gx;
                const double y = py[k] + tau * gy;
                const double r = std::max(1.0, std::hypot(x, y));
                px[k] = x / r;
                py[k] = y / r;
            }
        }
    }
    std::vector<double> u(n);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) u[g.index(i, j)] = f(i, j) - lambda * div(i, j);
    }
    return u;
}

}  // namespace

TEST_CASE("constant input is its own minimizer") {
    const Grid2 g = Grid2::unit_square(16);
    const ScalarField f(g, 0.7);
    const ProxResult r = tv_prox(f, ObstacleSpec::unconstrained(), params(1e-3));
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.gap == doctest::Approx(0.0));
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(r.u[k] == 0.7);
}

TEST_CASE("active constant obstacle lifts a nonpositive input") {
    const Grid2 g = Grid2::unit_square(16);
    const ScalarField f = ScalarField::sample(g, [](Point p) { return -std::abs(std::sin(7.0 * p.x + 3.0 * p.y)); });
    const ProxResult r = tv_prox(f, ObstacleSpec::constrained(ScalarField(g, 0.0)), params(1e-2));
    CHECK(r.converged);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(r.u[k] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("radial ROF plateau of a disk indicator") {
    const Grid2 g = Grid2::unit_square(64);
    const Point c{0.5, 0.5};
    const double R = 0.25;
    const double h = 0.01;
    const ScalarField f = ScalarField::sample(g, [&](Point p) { return norm(p - c) < R ? 1.0 : 0.0; });
    ProxParams p = params(h);
    p.tol = 1e-8;
    p.max_iter = 100000;
    const ProxResult r = tv_prox(f, ObstacleSpec::unconstrained(), p);
    REQUIRE(r.converged);
    const auto ref = projected_dual_ascent(f, h, 40000);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(r.u[k] - ref[k]));
    CHECK(worst < 2e-3);
    const double plateau = 1.0 - 2.0 * h / R;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (norm(g.point(k) - c) < R - 2.0 * g.spacing()) CHECK(std::abs(r.u[k] - plateau) <= 0.02);
    }
}

TEST_CASE("tiny grids match the ADMM oracle energy") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> hs(0.01, 0.1);
    const Grid2 g = Grid2::unit_square(8);
    for (int trial = 0; trial < 3; ++trial) {
        oracle::Problem pr{8, 8, g.spacing(), hs(rng), {}, {}};
        ScalarField f(g);
        ScalarField v(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            f[k] = val(rng);
            v[k] = val(rng) - 0.5;
            pr.f.push_back(f[k]);
            pr.v.push_back(v[k]);
        }
        ProxParams p = params(pr.h);
        p.tol = 1e-9;
        const ProxResult r = tv_prox(f, ObstacleSpec::constrained(v), p);
        REQUIRE(r.converged);
        const double e_ref = oracle::energy(pr, oracle::solve(pr, 50000));
        std::vector<double> u(r.u.values().begin(), r.u.values().end());
        CHECK(std::abs(oracle::energy(pr, u) - e_ref) <= 1e-6 * std::max(f.max_abs(), 1.0));
        CHECK(primal_energy(r.u, f, pr.h) == doctest::Approx(oracle::energy(pr, u)).epsilon(1e-12));
    }
}

TEST_CASE("duality gap identities") {
    const Grid2 g = Grid2::unit_square(16);
    const double h = 2e-3;
    const ScalarField c(g, 0.3);
    DualField z(g);
    CHECK(std::abs(dual_gap(c, z, c, ObstacleSpec::unconstrained(), h)) <= 1e-10);

    SUBCASE("zero dual field at u = f leaves the TV term") {
        const ScalarField f = ScalarField::sample(g, [](Point p) { return std::sin(5.0 * p.x) * p.y; });
        CHECK(dual_gap(f, z, f, ObstacleSpec::unconstrained(), h) == doctest::Approx(discrete_tv(f)).epsilon(1e-12));
    }
    SUBCASE("perturbing one cell raises the gap quadratically") {
        const double eps = 0.05;
        ScalarField u = c;
        u(7, 8) += eps;
        const double s = g.spacing();
        const double gap = dual_gap(u, z, c, ObstacleSpec::unconstrained(), h);
        CHECK(gap >= eps * eps * s * s / (2.0 * h));
        CHECK(gap == doctest::Approx(eps * eps * s * s / (2.0 * h) + discrete_tv(u)));
    }
    SUBCASE("infeasible iterate") {
        ScalarField v(g, 0.0);
        v(3, 3) = 0.5;
        CHECK_THROWS_AS(dual_gap(c, z, c, ObstacleSpec::constrained(v), h), Infeasible);
    }
    SUBCASE("dual field outside the unit disk") {
        DualField big(g);
        big.zx[5] = 1.1;
        CHECK_THROWS_AS(dual_gap(c, big, c, ObstacleSpec::unconstrained(), h), InvalidArgument);
    }
}

TEST_CASE("converged solves certify their gap") {
    const Grid2 g = Grid2::unit_square(32);
    const ScalarField f = ScalarField::sample(g, [](Point p) { return norm(p - Point{0.4, 0.6}) - 0.2; });
    const ScalarField v = ScalarField::sample(g, [](Point p) { return norm(p - Point{0.45, 0.6}) - 0.3; });
    const ProxResult r = tv_prox(f, ObstacleSpec::constrained(v), params(1e-3));
    REQUIRE(r.converged);
    CHECK(r.gap <= r.gap_ref * 1e-6);
    CHECK(r.gap >= -1e-10);
    CHECK(r.z.max_norm() <= 1.0 + 1e-12);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(r.u[k] >= v[k] - 1e-12);
    CHECK(dual_gap(r.u, r.z, f, ObstacleSpec::constrained(v), 1e-3) <= r.gap + 1e-12);
}

TEST_CASE("serial and parallel solves are identical") {
    const Grid2 g = Grid2::unit_square(48);
    const ScalarField f = ScalarField::sample(g, [](Point p) { return std::cos(6.0 * p.x) + p.y * p.y; });
    ProxParams a = params(5e-3);
    ProxParams b = a;
    a.exec = kernels::Exec::Serial;
    b.exec = kernels::Exec::Parallel;
    const ProxResult ra = tv_prox(f, ObstacleSpec::unconstrained(), a);
    const ProxResult rb = tv_prox(f, ObstacleSpec::unconstrained(), b);
    CHECK(ra.iterations == rb.iterations);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(ra.u[k] == rb.u[k]);
}

TEST_CASE("invalid prox input") {
    const Grid2 g = Grid2::unit_square(8);
    ScalarField f(g);
    CHECK_THROWS_AS(tv_prox(f, ObstacleSpec::unconstrained(), params(0.0)), InvalidArgument);
    ProxParams p = params(1e-3);
    p.tol = 0.0;
    CHECK_THROWS_AS(tv_prox(f, ObstacleSpec::unconstrained(), p), InvalidArgument);
    f[3] = std::nan("");
    CHECK_THROWS_AS(tv_prox(f, ObstacleSpec::unconstrained(), params(1e-3)), InvalidArgument);
    CHECK_THROWS_AS(tv_prox(ScalarField(g), ObstacleSpec::constrained(ScalarField(Grid2::unit_square(9))), params(1e-3)),
                    GridMismatch);
}

TEST_CASE("max_iter exhaustion reports non-convergence") {
    const Grid2 g = Grid2::unit_square(32);
    const ScalarField f = ScalarField::sample(g, [](Point p) { return p.x > 0.5 ? 1.0 : 0.0; });
    ProxParams p = params(1e-2);
    p.max_iter = 5;
    const ProxResult r = tv_prox(f, ObstacleSpec::unconstrained(), p);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 5);
}

TEST_CASE("forcing input raises only the outside cells") {
    const Grid2 g = Grid2::unit_square(8);
    const ScalarField f = ScalarField::sample(g, [](Point p) { return p.x - p.y; });
    RegionMask omega(g, true);
    CHECK(forcing_input(f, omega, 3.0, 0.1).values()[5] == f[5]);
    omega.set(2, 3, false);
    const ScalarField r = forcing_input(f, omega, 3.0, 0.1);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(r[k] == doctest::Approx(k == g.index(2, 3) ? f[k] + 0.3 : f[k]));
    const ScalarField zero = forcing_input(f, omega, 0.0, 0.1);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(zero[k] == f[k]);
    CHECK_THROWS_AS(forcing_input(f, RegionMask(Grid2::unit_square(9)), 1.0, 0.1), GridMismatch);
}

TEST_CASE("trace csv has the documented columns") {
    const Grid2 g = Grid2::unit_square(16);
    ProxParams p = params(1e-3);
    p.record_trace = true;
    const ScalarField f = ScalarField::sample(g, [](Point q) { return q.x; });
    const ProxResult r = tv_prox(f, ObstacleSpec::unconstrained(), p);
    REQUIRE_FALSE(r.trace.empty());
    const auto path = std::filesystem::temp_directory_path() / "mcfobs_trace.csv";
    write_trace_csv(path, r.trace);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "iteration,primal_energy,dual_energy,gap");
}
