#include <benchmark/benchmark.h>

#include "mecc/dual.hpp"
#include "mecc/experiments.hpp"
#include "mecc/lp.hpp"
#include "mecc/oracle.hpp"
#include "mecc/schemes.hpp"

namespace {

mecc::Scenario default_scenario() {
  mecc::ExperimentConfig cfg;
  return mecc::build_scenario(cfg);
}

void BM_achievable_rate(benchmark::State& state) {
  const mecc::Scenario s = default_scenario();
  double p = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mecc::rate_user_helper(s, p));
    p = p < 9.9 ? p + 0.1 : 0.1;
  }
}
BENCHMARK(BM_achievable_rate);

void BM_eval_dual(benchmark::State& state) {
  const mecc::Scenario s = default_scenario();
  mecc::DualPoint d;
  d.lambda1 = 3e-7;
  d.lambda2 = 2e-7;
  d.lambda3 = 1e-7;
  d.mu1 = 1e-3;
  d.mu2 = 4e-7;
  for (auto _ : state) benchmark::DoNotOptimize(mecc::eval_dual(d, s));
}
BENCHMARK(BM_eval_dual);

void BM_ellipsoid(benchmark::State& state) {
  const mecc::Scenario s = default_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(mecc::ellipsoid_maximize(s));
}
BENCHMARK(BM_ellipsoid)->Unit(benchmark::kMillisecond);

void BM_solve_joint(benchmark::State& state) {
  const mecc::Scenario s = default_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(mecc::solve_joint(s));
}
BENCHMARK(BM_solve_joint)->Unit(benchmark::kMillisecond);

void BM_feasibility_lp(benchmark::State& state) {
  const mecc::Scenario s = default_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(mecc::max_supportable_bits(s));
}
BENCHMARK(BM_feasibility_lp);

void BM_oracle_coarse(benchmark::State& state) {
  const mecc::Scenario s = default_scenario();
  mecc::GridSpec grid;
  grid.tau_points = 9;
  grid.bit_points = 13;
  grid.power_points = 20;
  grid.refine_rounds = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mecc::brute_force_min_energy(s, grid));
}
BENCHMARK(BM_oracle_coarse)->Unit(benchmark::kMillisecond);

void BM_schemes(benchmark::State& state) {
  const mecc::Scenario s = default_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mecc::local_only(s));
    benchmark::DoNotOptimize(mecc::computation_coop(s));
    benchmark::DoNotOptimize(mecc::communication_coop(s));
  }
}
BENCHMARK(BM_schemes)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
