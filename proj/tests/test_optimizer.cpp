#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "cowqkd/optimizer.hpp"

using namespace cowqkd;

namespace {

ProtocolParams base_params() {
  ProtocolParams p;
  p.mu = 0.01;
  p.t_b = 0.45;
  p.p_d1 = 0.02;
  p.p_d2 = 0.02;
  p.n_rounds = 10000000000LL;
  p.detector.p_dark = 2e-8;
  p.detector.eta_det = 0.7;
  p.e_mis = 0.01;
  p.f_ec = 1.1;
  return p;
}

double rate_at(const ProtocolParams& p, double eta, const SecurityBudget& budget) {
  const auto result = finite_key_rate(expected_counts(p, eta), p, budget);
  return result.aborted ? 0.0 : result.rate_per_pulse;
}

}  // namespace

TEST_SUITE_BEGIN("optimizer");

TEST_CASE("single free variable tracks a dense grid") {
  const auto scenario = ChannelScenario::from_length_km(30.0);
  const auto budget = epsilon_budget(1e-10, 1e-15);
  const double eta = system_transmittance(scenario);

  OptimizationSpec spec;
  spec.free_t_b = spec.free_p_d1 = spec.free_p_d2 = false;
  spec.mu = ParamRange{1e-4, 0.1};
  spec.eval_budget = 400;

  double grid_best = 0.0;
  double grid_best_mu = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto p = base_params();
    p.mu = 1e-4 * std::pow(1000.0, i / 999.0);
    const double rate = rate_at(p, eta, budget);
    if (rate > grid_best) {
      grid_best = rate;
      grid_best_mu = p.mu;
    }
  }
  REQUIRE(grid_best > 0.0);

  const auto result = optimize(base_params(), scenario, spec, budget);
  CHECK(result.result.rate_per_pulse >= grid_best * (1.0 - 1e-4));
  CHECK(std::abs(result.params.mu - grid_best_mu) / grid_best_mu < 0.1);
  CHECK(result.evaluations <= spec.eval_budget);
}

TEST_CASE("zero budget returns the template point") {
  const auto scenario = ChannelScenario::from_length_km(20.0);
  OptimizationSpec spec;
  spec.eval_budget = 0;
  const auto result = optimize(base_params(), scenario, spec, epsilon_budget(1e-10, 1e-15));
  CHECK(result.params.mu == base_params().mu);
  CHECK(result.params.t_b == base_params().t_b);
  CHECK(result.evaluations == 0);
}

TEST_CASE("all-fixed spec is an identity pass-through with evaluation") {
  const auto scenario = ChannelScenario::from_length_km(20.0);
  const auto budget = epsilon_budget(1e-10, 1e-15);
  OptimizationSpec spec;
  spec.free_mu = spec.free_t_b = spec.free_p_d1 = spec.free_p_d2 = false;
  const auto result = optimize(base_params(), scenario, spec, budget);
  CHECK(result.params.mu == base_params().mu);
  CHECK(result.result.rate_per_pulse ==
        rate_at(base_params(), system_transmittance(scenario), budget));
}

TEST_CASE("never worse than the template") {
  const auto budget = epsilon_budget(1e-10, 1e-15);
  for (double length : {0.0, 40.0, 90.0}) {
    const auto scenario = ChannelScenario::from_length_km(length);
    OptimizationSpec spec;
    spec.mu = ParamRange{1e-5, 1.0};
    spec.eval_budget = 3000;
    const auto result = optimize(base_params(), scenario, spec, budget);
    CHECK(result.result.rate_per_pulse >=
          rate_at(base_params(), system_transmittance(scenario), budget));
  }
}

TEST_CASE("deterministic for a fixed budget") {
  const auto scenario = ChannelScenario::from_length_km(50.0);
  const auto budget = epsilon_budget(1e-10, 1e-15);
  OptimizationSpec spec;
  spec.eval_budget = 2000;
  const auto a = optimize(base_params(), scenario, spec, budget);
  const auto b = optimize(base_params(), scenario, spec, budget);
  CHECK(a.params.mu == b.params.mu);
  CHECK(a.params.t_b == b.params.t_b);
  CHECK(a.params.p_d1 == b.params.p_d1);
  CHECK(a.params.p_d2 == b.params.p_d2);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("box and joint constraints hold at the optimum") {
  const auto scenario = ChannelScenario::from_length_km(10.0);
  OptimizationSpec spec;
  spec.mu = ParamRange{1e-4, 0.5};
  spec.p_d1 = ParamRange{1e-4, 0.5};
  spec.p_d2 = ParamRange{1e-4, 0.5};
  spec.eval_budget = 2500;
  const auto result = optimize(base_params(), scenario, spec, epsilon_budget(1e-10, 1e-15));
  CHECK(result.params.mu >= spec.mu.lo);
  CHECK(result.params.mu <= spec.mu.hi);
  CHECK(result.params.t_b >= spec.t_b.lo);
  CHECK(result.params.t_b <= spec.t_b.hi);
  CHECK(result.params.p_d1 + result.params.p_d2 < 1.0);
}

TEST_CASE("optimal intensity falls with distance past the plateau") {
  const auto budget = epsilon_budget(1e-10, 1e-15);
  OptimizationSpec spec;
  spec.mu = ParamRange{1e-5, 1.0};
  double prev_mu = 1e9;
  for (double length : {20.0, 60.0, 100.0}) {
    auto tmpl = base_params();
    tmpl.n_rounds = 100000000000LL;
    const auto result =
        optimize(tmpl, ChannelScenario::from_length_km(length), spec, budget);
    REQUIRE_FALSE(result.result.aborted);
    CHECK(result.params.mu < prev_mu);
    prev_mu = result.params.mu;
  }
}

TEST_CASE("empty box is rejected") {
  OptimizationSpec spec;
  spec.mu = ParamRange{0.5, 0.1};
  CHECK_THROWS_AS(
      optimize(base_params(), ChannelScenario::from_length_km(10.0), spec,
               epsilon_budget(1e-10, 1e-15)),
      std::invalid_argument);
}

TEST_SUITE_END();
