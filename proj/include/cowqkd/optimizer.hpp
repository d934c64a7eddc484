#pragma once

#include <cstdint>

#include "cowqkd/security.hpp"

namespace cowqkd {

struct ParamRange {
  double lo;
  double hi;
};

// Search specification for the free protocol parameters. The box defaults
// below suit short and medium distances; widen mu downward for long-distance
// points. The joint constraint p_d1 + p_d2 < 1 is enforced on every
// evaluated point.
struct OptimizationSpec {
  bool free_mu = true;
  bool free_t_b = true;
  bool free_p_d1 = true;
  bool free_p_d2 = true;
  ParamRange mu{1e-3, 1.0};
  ParamRange t_b{0.05, 0.95};
  ParamRange p_d1{1e-4, 0.5};
  ParamRange p_d2{1e-4, 0.5};
  int eval_budget = 12000;
  std::uint64_t seed = 0;
};

struct OptimizationResult {
  ProtocolParams params;
  KeyRateResult result;
  int evaluations = 0;
};

// Maximizes the finite-key rate of the deterministic expected-counts pipeline
// over the free parameters: coarse multi-start grid, then simplex refinement.
// Deterministic for a fixed (seed, budget); never returns a point worse than
// the best one evaluated, and with a zero budget returns the template point.
OptimizationResult optimize(const ProtocolParams& tmpl, const ChannelScenario& scenario,
                            const OptimizationSpec& spec, const SecurityBudget& budget,
                            BoundEngine engine = BoundEngine::kKato,
                            PhaseTrialConvention convention = PhaseTrialConvention::kSifted);

}  // namespace cowqkd
