// Serial reference vs OpenMP kernels, and whole prox solves in both modes.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mcfobs/kernels.hpp"
#include "mcfobs/obstacle_tv.hpp"

using namespace mcfobs;
using kernels::Exec;

namespace {

struct Buffers {
    kernels::Shape sh;
    std::vector<double> u, ubar, px, py, f, v, w;

    explicit Buffers(int n) : sh{n, n, static_cast<double>(n)} {
        const std::size_t m = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
        u.resize(m);
        px.assign(m, 0.0);
        py.assign(m, 0.0);
        f.resize(m);
        v.resize(m);
        w.resize(m);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * n + i;
                const double x = (i + 0.5) / n;
                const double y = (j + 0.5) / n;
                f[k] = std::hypot(x - 0.5, y - 0.5) - 0.3 + 0.02 * std::sin(40.0 * x);
                v[k] = f[k] - 0.05;
            }
        }
        u = f;
        ubar = f;
    }
};

Exec mode(const benchmark::State& st) { return st.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_DualAscent(benchmark::State& st) {
    Buffers b(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        kernels::dual_ascent(mode(st), b.sh, b.ubar.data(), b.px.data(), b.py.data(), 1e-3);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(b.u.size()));
}

void BM_PrimalDescent(benchmark::State& st) {
    Buffers b(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        kernels::primal_descent(mode(st), b.sh, b.u.data(), b.ubar.data(), b.px.data(), b.py.data(), b.f.data(),
                                b.v.data(), 1e-3, 1e-4, 1.0);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(b.u.size()));
}

void BM_DualTerms(benchmark::State& st) {
    Buffers b(static_cast<int>(st.range(0)));
    for (auto _ : st) {
        benchmark::DoNotOptimize(
            kernels::dual_terms(mode(st), b.sh, b.px.data(), b.py.data(), b.f.data(), b.v.data(), 1e-4, b.w.data()));
    }
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(b.u.size()));
}

void BM_TvSum(benchmark::State& st) {
    Buffers b(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::tv_sum(mode(st), b.sh, b.u.data()));
    st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(b.u.size()));
}

void BM_Prox(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const Grid2 g = Grid2::unit_square(n);
    const ScalarField f = ScalarField::sample(g, [](Point p) { return norm(p - Point{0.5, 0.5}) - 0.3; });
    ProxParams p;
    p.h = 1e-3;
    p.exec = mode(st);
    int iterations = 0;
    for (auto _ : st) {
        const ProxResult r = tv_prox(f, ObstacleSpec::unconstrained(), p);
        iterations = r.iterations;
        benchmark::DoNotOptimize(r.gap);
    }
    st.counters["prox_iterations"] = iterations;
}

// second argument: 0 serial, 1 OpenMP
#define KERNEL_ARGS ArgsProduct({{128, 256, 512}, {0, 1}})
BENCHMARK(BM_DualAscent)->KERNEL_ARGS;
BENCHMARK(BM_PrimalDescent)->KERNEL_ARGS;
BENCHMARK(BM_DualTerms)->KERNEL_ARGS;
BENCHMARK(BM_TvSum)->KERNEL_ARGS;
BENCHMARK(BM_Prox)->ArgsProduct({{128, 256}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
