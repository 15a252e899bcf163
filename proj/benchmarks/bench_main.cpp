#include <benchmark/benchmark.h>

#include "jitcluster/analytic.hpp"
#include "jitcluster/gates.hpp"
#include "jitcluster/graphstate.hpp"
#include "jitcluster/random.hpp"
#include "jitcluster/reservoir.hpp"
#include "jitcluster/walker.hpp"

namespace jc = jitcluster;

static void BM_AnalyticSweep(benchmark::State& state) {
    jc::ArchitectureParams params;
    params.dimension = 2;
    const auto steps = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto rows = jc::sweep_curve(params, jc::procedures::double_heralding(), 0.01, 1.0, steps, jc::SweepQuantity::T2);
        benchmark::DoNotOptimize(rows.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnalyticSweep)->Arg(100)->Arg(10000);

static void BM_BufferWalk(benchmark::State& state) {
    jc::WalkConfig config;
    config.horizon = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(jc::simulate_buffer(config));
        ++config.seed;
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BufferWalk)->Arg(1000)->Arg(1'000'000);

static void BM_RunRound(benchmark::State& state) {
    const auto pool = jc::ClusterPool::bare(static_cast<std::uint64_t>(state.range(0)));
    jc::Rng rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jc::run_round(pool, 0.5, jc::procedures::double_heralding(), rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunRound)->Arg(64)->Arg(4096);

// Path against cycle on the same vertices.
static void BM_LcEquivalentPath(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const auto path = jc::GraphState::path(0, n, 0);
    auto other = path;
    other.toggle_edge(0, n - 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(jc::lc_equivalent(path, other));
    }
}
BENCHMARK(BM_LcEquivalentPath)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
