// Serial reference vs OpenMP version of each parallel kernel.

#include <benchmark/benchmark.h>

#include "potts/aggregate_path.hpp"
#include "potts/coupling.hpp"
#include "potts/gibbs_exact.hpp"
#include "potts/mixing.hpp"

using namespace potts;

static void BM_LogZ_Serial(benchmark::State& st) {
  const ModelParams p(3, static_cast<int>(st.range(0)), 1.5);
  for (auto _ : st) benchmark::DoNotOptimize(serial::log_partition_function(p));
}
static void BM_LogZ_Parallel(benchmark::State& st) {
  const ModelParams p(3, static_cast<int>(st.range(0)), 1.5);
  for (auto _ : st) benchmark::DoNotOptimize(log_partition_function(p));
}
BENCHMARK(BM_LogZ_Serial)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogZ_Parallel)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_Replicas_Serial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const ModelParams p(3, n, 1.0);
  const auto x = BipartiteConfig::constant(3, n, 0), y = BipartiteConfig::constant(3, n, 1);
  for (auto _ : st) benchmark::DoNotOptimize(serial::run_coupling_replicas(p, x, y, 1'000'000, 1, 32));
}
static void BM_Replicas_Parallel(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const ModelParams p(3, n, 1.0);
  const auto x = BipartiteConfig::constant(3, n, 0), y = BipartiteConfig::constant(3, n, 1);
  for (auto _ : st) benchmark::DoNotOptimize(run_coupling_replicas(p, x, y, 1'000'000, 1, 32));
}
BENCHMARK(BM_Replicas_Serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Replicas_Parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_TvCurve_Serial(benchmark::State& st) {
  const ModelParams p(3, static_cast<int>(st.range(0)), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(serial::exact_tv_curve(p, 100));
}
static void BM_TvCurve_Parallel(benchmark::State& st) {
  const ModelParams p(3, static_cast<int>(st.range(0)), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(exact_tv_curve(p, 100));
}
BENCHMARK(BM_TvCurve_Serial)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TvCurve_Parallel)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_Lipschitz_Serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::lipschitz_ratio_near_rho(2.4, 3, 1e-3, static_cast<int>(st.range(0))));
}
static void BM_Lipschitz_Parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(lipschitz_ratio_near_rho(2.4, 3, 1e-3, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Lipschitz_Serial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lipschitz_Parallel)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
