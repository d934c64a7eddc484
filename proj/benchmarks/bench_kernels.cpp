// Serial-versus-OpenMP comparison for the two sampling kernels, plus the
// deterministic pipeline and one optimizer call for scale.

#include <benchmark/benchmark.h>

#include "cowqkd/coverage.hpp"
#include "cowqkd/optimizer.hpp"
#include "cowqkd/security.hpp"

namespace {

cowqkd::ProtocolParams bench_params(std::int64_t n_rounds) {
  cowqkd::ProtocolParams p;
  p.mu = 0.01;
  p.t_b = 0.5;
  p.p_d1 = 0.1;
  p.p_d2 = 0.1;
  p.n_rounds = n_rounds;
  p.detector.p_dark = 2e-8;
  p.detector.eta_det = 0.7;
  p.e_mis = 0.01;
  return p;
}

void BM_SimulateSerial(benchmark::State& state) {
  const auto params = bench_params(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cowqkd::simulate_counts_serial(params, 0.5, 42));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateParallel(benchmark::State& state) {
  const auto params = bench_params(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cowqkd::simulate_counts(params, 0.5, 42));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CoverageSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(cowqkd::kato_coverage_serial(0.1, 1000, 0.01, state.range(0), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CoverageParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(cowqkd::kato_coverage(0.1, 1000, 0.01, state.range(0), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FiniteKeyPipeline(benchmark::State& state) {
  const auto params = bench_params(100000000000LL);
  const auto budget = cowqkd::epsilon_budget(1e-10, 1e-15);
  const auto counts = cowqkd::expected_counts(params, 0.1585);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cowqkd::finite_key_rate(counts, params, budget));
  }
}

void BM_OptimizePoint(benchmark::State& state) {
  const auto params = bench_params(100000000000LL);
  const auto budget = cowqkd::epsilon_budget(1e-10, 1e-15);
  const auto scenario = cowqkd::ChannelScenario::from_length_km(50.0);
  cowqkd::OptimizationSpec spec;
  spec.mu = cowqkd::ParamRange{1e-5, 1.0};
  spec.eval_budget = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cowqkd::optimize(params, scenario, spec, budget));
  }
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(1 << 20)->Arg(1 << 24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageParallel)->Arg(20000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FiniteKeyPipeline)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OptimizePoint)->Arg(2000)->Arg(12000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
