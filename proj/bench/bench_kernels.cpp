#include <benchmark/benchmark.h>

#include "boolrr/families.hpp"
#include "boolrr/kernels.hpp"
#include "boolrr/process.hpp"
#include "boolrr/restriction.hpp"

using namespace boolrr;

namespace {

TruthTable random_table(int n) { return make_family("random:n=" + std::to_string(n) + ",seed=1")->materialize(); }

void BM_WhtSerial(benchmark::State& state) {
  const auto t = random_table(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto v = t.as_reals();
    kernels::wht_serial(v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}

void BM_WhtParallel(benchmark::State& state) {
  const auto t = random_table(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto v = t.as_reals();
    kernels::wht_parallel(v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}

void BM_FlipCountsSerial(benchmark::State& state) {
  const auto t = random_table(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::flip_counts_serial(t));
}

void BM_FlipCountsParallel(benchmark::State& state) {
  const auto t = random_table(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::flip_counts_parallel(t));
}

void BM_Scan(benchmark::State& state) {
  auto f = make_family("tribes:w=5");
  const Exec exec = state.range(0) == 0 ? Exec::kSerial : Exec::kParallel;
  for (auto _ : state) benchmark::DoNotOptimize(scan(*f, {0.05, 0.2, 0.4}, 2000, 1, ScanMode::kFixed, exec));
}

void BM_StoppingStats(benchmark::State& state) {
  auto f = make_family("maj:n=25");
  const Exec exec = state.range(0) == 0 ? Exec::kSerial : Exec::kParallel;
  for (auto _ : state) benchmark::DoNotOptimize(stopping_stats(*f, PiConfig{0.04, 0.0005, false, -1, 1}, 1000, exec));
}

}  // namespace

BENCHMARK(BM_WhtSerial)->Arg(16)->Arg(20);
BENCHMARK(BM_WhtParallel)->Arg(16)->Arg(20);
BENCHMARK(BM_FlipCountsSerial)->Arg(16)->Arg(20);
BENCHMARK(BM_FlipCountsParallel)->Arg(16)->Arg(20);
BENCHMARK(BM_Scan)->Arg(0)->Arg(1);
BENCHMARK(BM_StoppingStats)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
