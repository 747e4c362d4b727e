// Parallel kernels against their serial reference implementations.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "phasetype/distributions.hpp"
#include "phasetype/fit.hpp"
#include "phasetype/gof.hpp"
#include "phasetype/phase_sim.hpp"

using namespace phasetype;

namespace {

std::vector<double> rescaled_exponentials(std::size_t n) {
  RandomStream rng(1);
  SampleBatch b = sample(ExpParams(1.0), n, rng);
  double mean = 0.0;
  for (double x : b.values) mean += x;
  mean /= static_cast<double>(n);
  for (double& x : b.values) x /= mean;
  return b.values;
}

void BM_StatisticParallel(benchmark::State& state) {
  const auto y = rescaled_exponentials(static_cast<std::size_t>(state.range(0)));
  const gof::GofConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(gof::statistic_of_rescaled(y, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_StatisticReference(benchmark::State& state) {
  const auto y = rescaled_exponentials(static_cast<std::size_t>(state.range(0)));
  const gof::GofConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(gof::reference::statistic_of_rescaled(y, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BootstrapParallel(benchmark::State& state) {
  gof::GofConfig cfg;
  cfg.bootstrap_reps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gof::bootstrap_replicates(200, cfg));
}

void BM_BootstrapReference(benchmark::State& state) {
  gof::GofConfig cfg;
  cfg.bootstrap_reps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gof::reference::bootstrap_replicates(200, cfg));
}

void BM_SimulateParallel(benchmark::State& state) {
  const sim::StageChain chain = sim::eme_chain(3, 1.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_absorption(chain, static_cast<std::size_t>(state.range(0)), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateReference(benchmark::State& state) {
  const sim::StageChain chain = sim::eme_chain(3, 1.0, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::reference::simulate_absorption(chain, static_cast<std::size_t>(state.range(0)), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogLikelihoodParallel(benchmark::State& state) {
  RandomStream rng(2);
  const SampleBatch b = sample(EMEParams(2, 1.0, 4.0), static_cast<std::size_t>(state.range(0)), rng);
  const EMEParams p(2, 1.1, 3.5);
  for (auto _ : state) benchmark::DoNotOptimize(eme_log_likelihood(p, b.values));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LogLikelihoodSerial(benchmark::State& state) {
  RandomStream rng(2);
  const SampleBatch b = sample(EMEParams(2, 1.0, 4.0), static_cast<std::size_t>(state.range(0)), rng);
  const EMEParams p(2, 1.1, 3.5);
  for (auto _ : state) {
    double s = 0.0;
    for (double x : b.values) s += log_pdf(p, x);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_StatisticParallel)->Arg(200)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StatisticReference)->Arg(200)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BootstrapParallel)->Arg(999)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapReference)->Arg(999)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateReference)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogLikelihoodParallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogLikelihoodSerial)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
