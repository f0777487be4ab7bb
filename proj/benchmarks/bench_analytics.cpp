#include <benchmark/benchmark.h>

#include "screenlab/bernoulli.hpp"
#include "screenlab/dynamic_policy.hpp"
#include "screenlab/gaussian.hpp"
#include "screenlab/threshold_optimizer.hpp"
#include "screenlab/verification.hpp"

namespace {

using namespace screenlab;

void BM_BinomialTail(benchmark::State& state) {
  const int tau = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(binomial_tail(tau, 0.3, tau / 2));
  }
}
BENCHMARK(BM_BinomialTail)->Arg(16)->Arg(64)->Arg(256);

void BM_ThresholdConfusion(benchmark::State& state) {
  const PopulationParams params(0.5, 0.4);
  const ThresholdPolicy policy(static_cast<int>(state.range(0)),
                               static_cast<int>(state.range(0)) / 2, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(threshold_confusion(policy, params));
  }
}
BENCHMARK(BM_ThresholdConfusion)->Arg(8)->Arg(32)->Arg(64);

void BM_BudgetOptimizer(benchmark::State& state) {
  const PopulationParams params(0.5, 1.0 / 3);
  const BudgetConstraint budget(18.0);
  const int tau_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_fdr_budget(params, budget, tau_max));
  }
}
BENCHMARK(BM_BudgetOptimizer)->Arg(12)->Arg(32)->Arg(64);

void BM_MarkovAbsorptionOracle(benchmark::State& state) {
  const int a = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(markov_absorption_oracle(a, a / 2, 0.65));
  }
}
BENCHMARK(BM_MarkovAbsorptionOracle)->Arg(16)->Arg(60)->Arg(240);

void BM_GreedySimulation(benchmark::State& state) {
  const PopulationParams params(0.5, 1.0 / 3);
  const GreedyPolicyParams gp(0.1, 0.5);
  const GreedyExperiment experiment{params, gp};
  const long n = state.range(0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_experiment(SimulationConfig{seed++, n, 2}, experiment));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GreedySimulation)->Arg(10000)->Arg(100000);

void BM_SchurOracle(benchmark::State& state) {
  const GaussianModel model(0.0, 1.0, 0.5);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(schur_oracle(model, n));
  }
}
BENCHMARK(BM_SchurOracle)->Arg(10)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
