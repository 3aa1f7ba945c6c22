#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lps/convolution.hpp"
#include "lps/gfun.hpp"
#include "lps/kernels.hpp"
#include "lps/loops.hpp"

using namespace lps;

namespace {

std::vector<double> noise(std::size_t n, unsigned seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (double& x : v) x = d(g);
    return v;
}

loops::Exec exec_of(const benchmark::State& s) { return s.range(1) ? loops::Exec::parallel : loops::Exec::serial; }

void BM_PointwiseNorms(benchmark::State& state) {
    const std::size_t cells = state.range(0);
    const int M = 8;
    const auto v = noise(cells * M, 1);
    std::vector<double> out(cells);
    for (auto _ : state) {
        loops::pointwise_norms(v, M, 3.0, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_PointwiseNorms)->ArgsProduct({{1 << 12, 1 << 16}, {0, 1}});

void BM_WeightedColumnSums(benchmark::State& state) {
    const std::size_t cells = state.range(0), K = 200;
    const auto rows = noise(cells * K, 2), w = noise(K, 3);
    std::vector<double> out(cells);
    for (auto _ : state) {
        loops::weighted_column_sums(rows, w, cells, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_WeightedColumnSums)->ArgsProduct({{1 << 10, 1 << 14}, {0, 1}});

void BM_DenseApply(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto A = noise(static_cast<std::size_t>(N) * N, 4), in = noise(static_cast<std::size_t>(N) * N, 5);
    std::vector<double> out(in.size());
    for (auto _ : state) {
        loops::dense_apply(A, N, in, out, N, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_DenseApply)->ArgsProduct({{64, 256}, {0, 1}});

// Line convolution: direct O(N^2) loop (serial and OpenMP) against the padded FFT.
void BM_ConvolveDirect(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const Domain d = Domain::line(N, 8.0);
    const auto table = kernel_table(KernelFamily::poisson, KernelPart::value, 0.5, d);
    const auto in = noise(N, 6);
    std::vector<double> out(N);
    for (auto _ : state) {
        loops::convolve_direct(table, in, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_ConvolveDirect)->ArgsProduct({{256, 1024, 4096}, {0, 1}});

void BM_ConvolveFft(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const Domain d = Domain::line(N, 8.0);
    const auto table = kernel_table(KernelFamily::poisson, KernelPart::value, 0.5, d);
    const auto in = noise(N, 6);
    const PaddedConvolution conv(d);
    for (auto _ : state) benchmark::DoNotOptimize(conv.convolve(table, in));
}
BENCHMARK(BM_ConvolveFft)->Arg(256)->Arg(1024)->Arg(4096);

void BM_GFunctionTorus(benchmark::State& state) {
    const GridFunction f = GridFunction::scalar(Domain::torus(static_cast<int>(state.range(0))),
                                                [](Point x) { return std::cos(x[0]) + 0.3 * std::sin(5 * x[0]); });
    const GSpec spec{subordinated(heat_torus()), 2.0, GVariant::full, TimeGrid{}, {}};
    for (auto _ : state) benchmark::DoNotOptimize(gfunction(f, spec, exec_of(state)));
}
BENCHMARK(BM_GFunctionTorus)->ArgsProduct({{1024, 8192}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
