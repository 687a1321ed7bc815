#include <benchmark/benchmark.h>

#include <random>

#include "harness.hpp"
#include "lomv/montecarlo.hpp"
#include "lomv/oracle.hpp"
#include "lomv/solver.hpp"

namespace {

lomv::FactorModel normal_instance(std::size_t p) {
  lomv::SimConfig cfg;
  cfg.p = p;
  cfg.seed = 1;
  return lomv::sample_trial(cfg, 0);
}

void BM_SolveLomv(benchmark::State& state) {
  const auto model = normal_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lomv::solve_lomv(model));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveLomv)->RangeMultiplier(10)->Range(100, 1000000)->Complexity();

void BM_SolveGmv(benchmark::State& state) {
  const auto model = normal_instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(lomv::solve_gmv_longshort(model));
  }
}
BENCHMARK(BM_SolveGmv)->RangeMultiplier(10)->Range(100, 1000000);

void BM_VerifyKkt(benchmark::State& state) {
  const auto model = normal_instance(static_cast<std::size_t>(state.range(0)));
  const auto sol = lomv::solve_lomv(model);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lomv::verify_kkt(model, sol.weights, 1e-8));
  }
}
BENCHMARK(BM_VerifyKkt)->Arg(100000);

void BM_Oracle(benchmark::State& state) {
  std::mt19937_64 rng(3);
  lomv::FactorModel model = lomv::harness::random_oracle_instance(rng, 1);
  while (model.size() != static_cast<std::size_t>(state.range(0))) {
    model = lomv::harness::random_oracle_instance(
        rng, static_cast<std::size_t>(state.range(0)));
  }
  const auto cov = lomv::DenseCovariance::from_factor_model(model);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lomv::oracle_solve(cov));
  }
}
BENCHMARK(BM_Oracle)->DenseRange(4, 12, 4);

void BM_RunBatch(benchmark::State& state) {
  lomv::SimConfig cfg;
  cfg.p = static_cast<std::size_t>(state.range(0));
  cfg.trials = 50;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lomv::run_batch(cfg));
  }
}
BENCHMARK(BM_RunBatch)->Arg(3000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
