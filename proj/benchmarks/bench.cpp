#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ekdiff/ekops.hpp"
#include "ekdiff/greenfn.hpp"
#include "ekdiff/mwright.hpp"
#include "ekdiff/sampler.hpp"
#include "ekdiff/solver.hpp"

using namespace ekdiff;

// The density evaluation escalates through precision tiers as the series
// cancellation grows; each fixture pins one tier.
static void BM_MWrightDoubleTier(benchmark::State& state) {
    const WrightOrder nu(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(mwright_eval(nu, 1.5));
}
BENCHMARK(BM_MWrightDoubleTier);

static void BM_MWrightDoubleDoubleTier(benchmark::State& state) {
    const WrightOrder nu(0.75);
    for (auto _ : state) benchmark::DoNotOptimize(mwright_eval(nu, 3.0));
}
BENCHMARK(BM_MWrightDoubleDoubleTier);

static void BM_MWrightMpfrTier(benchmark::State& state) {
    const WrightOrder nu(0.9);
    for (auto _ : state) benchmark::DoNotOptimize(mwright_eval(nu, 2.3));
}
BENCHMARK(BM_MWrightMpfrTier);

static void BM_GreenPointwise(benchmark::State& state) {
    const DiffusionParams p(0.8, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(ggbm_green(p, 1.3, 0.7));
}
BENCHMARK(BM_GreenPointwise);

static void BM_GreenMixture(benchmark::State& state) {
    const DiffusionParams p(0.8, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(green_mixture(p, 1.3, 0.7));
}
BENCHMARK(BM_GreenMixture);

static void BM_EkIntegralSmooth(benchmark::State& state) {
    const EKParams p(0.5, 0.7, 1.0);
    const SampledFunction f =
        SampledFunction::from_callable([](double t) { return std::exp(-t); });
    for (auto _ : state) benchmark::DoNotOptimize(ek_integral(p, f, 1.3));
}
BENCHMARK(BM_EkIntegralSmooth);

static void BM_EkIntegralGradedFallback(benchmark::State& state) {
    // fractional c/eta forces the composite path
    const EKParams p(-0.5, 0.3, 2.0);
    const SampledFunction f =
        SampledFunction::from_callable([](double t) { return std::sqrt(t); });
    for (auto _ : state) benchmark::DoNotOptimize(ek_integral(p, f, 1.3));
}
BENCHMARK(BM_EkIntegralGradedFallback);

static void BM_EkDerivative(benchmark::State& state) {
    const EKParams p(0.3, 0.45, 1.3);
    const SampledFunction f =
        SampledFunction::from_callable([](double t) { return t * t; });
    for (auto _ : state) benchmark::DoNotOptimize(ek_derivative(p, f, 0.9));
}
BENCHMARK(BM_EkDerivative);

static void BM_SolveBrownian(benchmark::State& state) {
    const std::size_t nt = static_cast<std::size_t>(state.range(0));
    SolverConfig cfg(DiffusionParams(1.0, 1.0), Grid1D(-10.0, 10.0, 201), 0.1, 1.0, nt);
    cfg.record_every = nt;
    for (auto _ : state) benchmark::DoNotOptimize(solve(cfg));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(nt));
}
BENCHMARK(BM_SolveBrownian)->Arg(25)->Arg(50)->Arg(100)->Complexity();

static void BM_SolveMemory(benchmark::State& state) {
    // beta < 1: full-history weights plus the below-t0 memory quadrature
    const std::size_t nt = static_cast<std::size_t>(state.range(0));
    SolverConfig cfg(DiffusionParams(0.8, 0.5), Grid1D(-8.0, 8.0, 201), 0.1, 1.0, nt);
    cfg.record_every = nt;
    for (auto _ : state) benchmark::DoNotOptimize(solve(cfg));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(nt));
}
BENCHMARK(BM_SolveMemory)->Arg(25)->Arg(50)->Arg(100)->Complexity();

static void BM_FbmPaths(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> nodes(32);
    for (std::size_t k = 0; k < nodes.size(); ++k)
        nodes[k] = static_cast<double>(k + 1) / 32.0;
    for (auto _ : state) benchmark::DoNotOptimize(fbm_paths(0.75, nodes, n, 7));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FbmPaths)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_SampleTau(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sample_tau(0.5, 4096, 11));
}
BENCHMARK(BM_SampleTau);

BENCHMARK_MAIN();
