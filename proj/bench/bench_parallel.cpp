// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "lanechange/config_io.hpp"
#include "lanechange/crosscheck.hpp"
#include "lanechange/oracle.hpp"
#include "lanechange/scenario.hpp"

using namespace lanechange;

namespace {

OracleOptions oracle_options() {
  OracleOptions o;
  o.segments = 3;
  o.levels = {-7.0, -4.5, -2.0, 0.0, 1.0, 2.0, 2.7, 3.0, 3.3};
  return o;
}

std::vector<double> sweep_dists() {
  std::vector<double> d;
  for (int k = 20; k <= 100; k += 10) d.push_back(k);
  return d;
}

void BM_OracleSerial(benchmark::State& st) {
  const OcpSpec spec = shrunken_catchup_spec(2, false);
  const OracleOptions o = oracle_options();
  for (auto _ : st) benchmark::DoNotOptimize(brute_force_oracle_serial(spec, o));
}

void BM_OracleParallel(benchmark::State& st) {
  const OcpSpec spec = shrunken_catchup_spec(2, false);
  const OracleOptions o = oracle_options();
  for (auto _ : st) benchmark::DoNotOptimize(brute_force_oracle(spec, o));
}

void BM_SweepSerial(benchmark::State& st) {
  const ScenarioConfig cfg = preset("table3");
  const auto d = sweep_dists();
  for (auto _ : st) benchmark::DoNotOptimize(dist_sweep_serial(cfg, d));
}

void BM_SweepParallel(benchmark::State& st) {
  const ScenarioConfig cfg = preset("table3");
  const auto d = sweep_dists();
  for (auto _ : st) benchmark::DoNotOptimize(dist_sweep(cfg, d));
}

}  // namespace

BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
