#include <benchmark/benchmark.h>

#include <vector>

#include "facetlab/ensemble.hpp"
#include "facetlab/majorant.hpp"
#include "facetlab/samplers.hpp"

using namespace facetlab;

namespace {

std::vector<ChainTask> tasks(std::int64_t n, std::size_t chains) {
  std::vector<ChainTask> out;
  for (std::size_t c = 0; c < chains; ++c) {
    ChainTask t;
    t.lambda = 0.3;
    t.n = n;
    t.seed = 7;
    t.chain = c;
    t.burn_in = 50;
    t.samples = 10;
    t.thin = 10;
    t.moves.interior_fraction = 0.5;
    t.moves.indel_fraction = 0.5;
    out.push_back(t);
  }
  return out;
}

void BM_ChainsSerial(benchmark::State& state) {
  const auto t = tasks(state.range(0), 16);
  for (auto _ : state) benchmark::DoNotOptimize(run_chains_serial(t));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}

void BM_ChainsParallel(benchmark::State& state) {
  const auto t = tasks(state.range(0), 16);
  const int w = worker_count();
  for (auto _ : state) benchmark::DoNotOptimize(run_chains_parallel(t, w));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
  state.counters["workers"] = w;
}

void BM_Majorant(benchmark::State& state) {
  RngStream rng(9, 0);
  StepSequence s;
  for (std::int64_t i = 0; i < state.range(0); ++i) s.push_back(rng.coin() ? Step::Down : Step::Right);
  const auto downs = static_cast<std::int64_t>(s.count_down());
  const LatticePath p(downs, s);
  for (auto _ : state) benchmark::DoNotOptimize(least_concave_majorant(p));
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_ChainsSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChainsParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Majorant)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity();

BENCHMARK_MAIN();
