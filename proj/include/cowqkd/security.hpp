#pragma once

#include <array>
#include <cstdint>

#include "cowqkd/channel.hpp"
#include "cowqkd/concentration.hpp"
#include "cowqkd/model.hpp"

namespace cowqkd {

enum class BoundEngine { kKato, kAzuma };

// Convention for the expected number of phase-error clicks before the
// observed-value conversion: relative to the sifted-key size n_z (the
// dimensionally consistent default) or to the total round count N.
enum class PhaseTrialConvention { kSifted, kTotal };

// Decoy rows in the estimation tables: 0 = |a>|a>, 1 = |0>|0>.
inline constexpr int kRowPulsed = 0;
inline constexpr int kRowVacuum = 1;

// Concentration bounds on the expected decoy counts and the derived gain
// bounds: four uppers (both decoys, both detectors) and two lowers (M0 only),
// each consuming failure probability eps1.
struct BoundedExpectations {
  std::array<std::array<double, 2>, 2> n_upper{};
  std::array<double, 2> n_lower{};
  std::array<std::array<double, 2>, 2> q_upper{};
  std::array<double, 2> q_lower{};
  std::array<std::array<ConcentrationBound, 2>, 2> upper_bounds{};
  std::array<ConcentrationBound, 2> lower_bounds{};
};

struct PhaseGainBounds {
  double q0x_m1_upper = 0.0;
  double q0x_m0_lower = 0.0;
};

struct PhaseErrorEstimate {
  double ep_expected = 0.0;  // expected-case upper bound before conversion
  double deviation = 0.0;    // observed-value conversion term
  double ep_upper = 0.0;     // clamped into [0, 0.5] when not aborted
  bool aborted = false;      // the bound exceeded 1/2
};

// Failure probability consumed by the pipeline, slot by slot; total() uses
// the same summation order as SecurityBudget so equality is exact.
struct BudgetAudit {
  double eps_smooth = 0.0;
  double eps0 = 0.0;
  double eps1_each = 0.0;
  int eps1_count = 0;
  double eps2 = 0.0;

  double total() const { return (2.0 * eps_smooth + eps0) + eps1_count * eps1_each + eps2; }
};

struct EvalTrace {
  BoundedExpectations decoy;
  PhaseGainBounds phase_gains;
  PhaseErrorEstimate phase_error;
  std::array<std::array<double, 2>, 2> signal_mon_gains{};  // [bit][detector]
  BudgetAudit budget;
};

struct KeyRateResult {
  std::int64_t key_length = 0;
  double rate_per_pulse = 0.0;
  double n_z = 0.0;
  double e_p_upper = 0.0;
  double e_z = 0.0;
  double leak_ec = 0.0;
  bool aborted = false;
  EvalTrace trace;
};

// Six decoy-count bounds at failure probability eps1 each. Throws if either
// decoy state was never sent. The Azuma engine swaps every deviation for the
// distribution-free baseline; everything downstream is unchanged.
BoundedExpectations bound_expected_counts(const RealCounts& counts,
                                          const SecurityBudget& budget,
                                          BoundEngine engine = BoundEngine::kKato);

// Expected-case decoy estimates of the X-basis gains: an upper bound for the
// destructive port and a lower bound for the constructive port, clamped into
// [0, 1] and [0, ...) respectively.
PhaseGainBounds phase_gain_bounds(const BoundedExpectations& be, double mu);

// Expected-case phase-error upper bound from the gain bounds and the observed
// signal-state monitoring gains, then converted to an observed-value bound at
// failure probability eps2.
PhaseErrorEstimate phase_error_upper(const RealCounts& counts, const PhaseGainBounds& pg,
                                     double mu, const SecurityBudget& budget,
                                     PhaseTrialConvention convention = PhaseTrialConvention::kSifted);

// Final key length
//   l = floor( n_z [1 - h(e_p)] - f_ec n_z h(e_z) - log2(2/eps_cor) - 2 log2(1/(2 eps0)) ),
// clamped at zero with the abort flag set when non-positive.
KeyRateResult key_length(double n_z, double e_p_upper, double e_z,
                         const SecurityBudget& budget, double f_ec, double total_rounds);

// The full estimation pipeline on a set of (real-valued) counts.
KeyRateResult finite_key_rate(const RealCounts& counts, const ProtocolParams& params,
                              const SecurityBudget& budget,
                              BoundEngine engine = BoundEngine::kKato,
                              PhaseTrialConvention convention = PhaseTrialConvention::kSifted);

// Infinite-limit rate per pulse: the same decoy-bound structure evaluated on
// exact expected gains, with all statistical deviations and constant
// penalties dropped.
double asymptotic_key_rate(const ProtocolParams& params, double eta);

}  // namespace cowqkd
