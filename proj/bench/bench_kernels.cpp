#include <benchmark/benchmark.h>

#include "cohlab/experiment.hpp"
#include "cohlab/linflat.hpp"

using namespace cohlab;

namespace {

Flat random_flat(int n, int k) {
  Rng rng(1);
  Matrix m(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = rng.normal();
  return make_flat(m, Vector::Zero(n));
}

void BM_leverage_parallel(benchmark::State& state) {
  const Flat f = random_flat(static_cast<int>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(leverage_scores(f));
}

void BM_leverage_serial(benchmark::State& state) {
  const Flat f = random_flat(static_cast<int>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(serial::leverage_scores(f));
}

SweepConfig sweep_config() {
  return SweepConfig{"cayley:n=12,d=2", {0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0}, 64, 7};
}

void BM_sweep_parallel(benchmark::State& state) {
  const SweepConfig cfg = sweep_config();
  const VarietyModel model = VarietyModel::cayley_menger(12, 2);
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(model, cfg));
}

void BM_sweep_serial(benchmark::State& state) {
  const SweepConfig cfg = sweep_config();
  const VarietyModel model = VarietyModel::cayley_menger(12, 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::run_sweep(model, cfg));
}

void BM_rigidity_parallel(benchmark::State& state) {
  laman_bases(6);  // exclude the one-time table build
  for (auto _ : state) benchmark::DoNotOptimize(compare_rigidity_oracles(6, 3));
}

void BM_rigidity_serial(benchmark::State& state) {
  laman_bases(6);
  for (auto _ : state) benchmark::DoNotOptimize(serial::compare_rigidity_oracles(6, 3));
}

void BM_laman_table_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::laman_bases(6));
}

}  // namespace

BENCHMARK(BM_leverage_parallel)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_leverage_serial)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_sweep_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rigidity_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rigidity_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_laman_table_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
