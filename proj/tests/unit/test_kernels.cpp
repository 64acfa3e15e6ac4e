#include <doctest.h>
#include <omp.h>

#include <cstring>
#include <random>
#include <vector>

#include "mcfobs/kernels.hpp"

using namespace mcfobs::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("serial and parallel kernels agree bit for bit") {
    omp_set_num_threads(4);
    std::mt19937_64 rng(3);
    for (auto [nx, ny] : {std::pair{37, 53}, std::pair{64, 64}, std::pair{5, 200}}) {
        const Shape sh{nx, ny, 17.0};
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        const auto u0 = random_vec(rng, n, -1.0, 1.0);
        const auto f = random_vec(rng, n, -1.0, 1.0);
        const auto v = random_vec(rng, n, -1.5, 0.5);
        auto px0 = random_vec(rng, n, -0.7, 0.7);
        auto py0 = random_vec(rng, n, -0.7, 0.7);

        auto pxa = px0, pya = py0, pxb = px0, pyb = py0;
        serial::dual_ascent(sh, u0.data(), pxa.data(), pya.data(), 0.013);
        parallel::dual_ascent(sh, u0.data(), pxb.data(), pyb.data(), 0.013);
        CHECK(same_bits(pxa, pxb));
        CHECK(same_bits(pya, pyb));

        for (const double* vp : {v.data(), static_cast<const double*>(nullptr)}) {
            auto ua = u0, ub = u0, bara = u0, barb = u0;
            serial::primal_descent(sh, ua.data(), bara.data(), pxa.data(), pya.data(), f.data(), vp, 0.02, 1e-3, 0.9);
            parallel::primal_descent(sh, ub.data(), barb.data(), pxa.data(), pya.data(), f.data(), vp, 0.02, 1e-3, 0.9);
            CHECK(same_bits(ua, ub));
            CHECK(same_bits(bara, barb));

            std::vector<double> wa(n), wb(n);
            const DualSums sa = serial::dual_terms(sh, pxa.data(), pya.data(), f.data(), vp, 1e-3, wa.data());
            const DualSums sb = parallel::dual_terms(sh, pxa.data(), pya.data(), f.data(), vp, 1e-3, wb.data());
            CHECK(same_bits(wa, wb));
            CHECK(same_bits(sa.fidelity, sb.fidelity));
            CHECK(same_bits(sa.coupling, sb.coupling));
        }
        CHECK(same_bits(serial::tv_sum(sh, u0.data()), parallel::tv_sum(sh, u0.data())));
        CHECK(same_bits(serial::squared_distance(sh, u0.data(), f.data()),
                        parallel::squared_distance(sh, u0.data(), f.data())));
    }
}

TEST_CASE("dual ascent projects onto the unit disk") {
    const Shape sh{8, 8, 1.0};
    std::vector<double> u(64);
    for (std::size_t k = 0; k < 64; ++k) u[k] = static_cast<double>(k * k % 13);
    std::vector<double> px(64, 0.0), py(64, 0.0);
    serial::dual_ascent(sh, u.data(), px.data(), py.data(), 10.0);
    for (std::size_t k = 0; k < 64; ++k) CHECK(px[k] * px[k] + py[k] * py[k] <= 1.0 + 1e-15);
    // Zero flux through the last column and row.
    for (int j = 0; j < 8; ++j) CHECK(px[static_cast<std::size_t>(j * 8 + 7)] == 0.0);
    for (int i = 0; i < 8; ++i) CHECK(py[static_cast<std::size_t>(56 + i)] == 0.0);
}

TEST_CASE("tv_sum of a step") {
    const Shape sh{4, 4, 1.0};
    std::vector<double> u(16, 0.0);
    for (int j = 0; j < 4; ++j) u[static_cast<std::size_t>(j * 4 + 3)] = 2.0;
    CHECK(serial::tv_sum(sh, u.data()) == doctest::Approx(8.0));
}
