#include "renoise/experiments.hpp"
#include "renoise/noise_sim.hpp"
#include "renoise/transfer.hpp"

#include <benchmark/benchmark.h>

using namespace renoise;

namespace {

void BM_Simulate(benchmark::State& state, ExecPolicy policy)
{
    MapSpec f = resolve_map("pd");
    NoiseModel noise;
    SimOptions opt;
    opt.policy = policy;
    const long long n = state.range(0);
    const auto M = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) {
        EnsembleResult e = simulate(f, 0.0, n, 1e-6, noise, M, 7, opt);
        benchmark::DoNotOptimize(e.endpoint.data());
    }
    state.SetItemsProcessed(state.iterations() * n * static_cast<long long>(M));
}

void BM_PdOperator(benchmark::State& state, bool parallel)
{
    const PdContext& ctx = pd_context(1);
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto A = build_pd_operator(ctx.g, 2.0, false, N, parallel);
        benchmark::DoNotOptimize(A.matrix.data());
    }
}

} // namespace

BENCHMARK_CAPTURE(BM_Simulate, serial, ExecPolicy::Serial)->Args({1024, 20000})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Simulate, parallel, ExecPolicy::Parallel)->Args({1024, 20000})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PdOperator, serial, false)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PdOperator, parallel, true)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
