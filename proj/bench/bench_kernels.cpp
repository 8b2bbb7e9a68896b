// Serial reference against the OpenMP kernels. Argument 0 selects serial, 1 parallel.

#include "chaosres/kernels.hpp"
#include "chaosres/matrixisation.hpp"
#include "test_support.hpp"

#include <benchmark/benchmark.h>

using namespace chaosres;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_ChaosCube(benchmark::State& state) {
    const auto f = testing_support::random_real_tensor({7, 7, 7}, 0.5, 1);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::chaos_cube(f, exec_of(state)));
    label(state);
}
BENCHMARK(BM_ChaosCube)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RestrictionNormCube(benchmark::State& state) {
    const auto f = testing_support::random_real_tensor({10, 10, 10}, 0.5, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::restriction_norm_cube(f, 0, exec_of(state)));
    label(state);
}
BENCHMARK(BM_RestrictionNormCube)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SymDiff(benchmark::State& state) {
    const auto a = matrixise(testing_support::random_real_tensor({24, 24, 24}, 0.3, 3), 0);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::accumulate_symdiff(a, 1'000'000'000, exec_of(state)));
    label(state);
}
BENCHMARK(BM_SymDiff)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MaxFlipDelta(benchmark::State& state) {
    const std::vector<std::size_t> dims{12, 12, 12};
    const auto f = testing_support::random_real_tensor(dims, 0.3, 4);
    const auto e = sample_ensemble(dims, 5);
    const std::vector<std::size_t> budget{2, 2, 1};
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::max_flip_delta(f, e, budget, 1'000'000'000, exec_of(state)));
    label(state);
}
BENCHMARK(BM_MaxFlipDelta)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
