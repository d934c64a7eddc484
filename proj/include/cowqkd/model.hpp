#pragma once

#include <cstdint>
#include <optional>

namespace cowqkd {

enum class BasisMode { kPassive, kActive };

// Threshold single-photon detector; D_T, D_M0 and D_M1 share one model.
struct DetectorModel {
  double p_dark = 2e-8;  // dark-count probability per detector per time window
  double eta_det = 0.7;  // detection efficiency
};

// Tunable protocol and device parameters. One two-pulse state is emitted per
// round, so the total pulse count is 2 * n_rounds. The per-round sending
// probabilities are p_z (each signal bit), p_d1 (pulsed decoy |a>|a>) and
// p_d2 (vacuum decoy |0>|0>), with p_z derived as (1 - p_d1 - p_d2) / 2.
struct ProtocolParams {
  double mu = 0.01;  // mean photon number of the coherent pulse, |alpha|^2
  double t_b = 0.5;  // beam-splitter transmittance toward the data line
  double p_d1 = 0.05;
  double p_d2 = 0.05;
  std::int64_t n_rounds = 1;
  BasisMode basis = BasisMode::kPassive;
  DetectorModel detector{};
  double e_mis = 0.01;  // optical misalignment error rate
  double f_ec = 1.1;    // error-correction efficiency

  // Active basis choice routes a round to the data line with probability t_b
  // unless this override is set.
  std::optional<double> active_route_prob{};

  double p_z() const { return 0.5 * (1.0 - p_d1 - p_d2); }
  double route_prob() const { return active_route_prob.value_or(t_b); }
};

// Composable failure-probability budget. The secrecy bound splits into ten
// slots: two smoothing terms, one hashing term, six concentration bounds on
// decoy counts and one phase-error conversion, so that
//   eps_sec == 2 * eps_smooth + eps0 + 6 * eps1 + eps2
// holds exactly on the stored fields.
struct SecurityBudget {
  double eps_cor = 1e-15;
  double eps_sec = 1e-10;
  double eps_smooth = 1e-11;
  double eps0 = 1e-11;
  double eps1 = 1e-11;
  double eps2 = 1e-11;
};

struct NormalizationPair {
  double n_plus;   // 2 (1 + e^{-mu})
  double n_minus;  // 2 (1 - e^{-mu})
};

// Binary Shannon entropy; h(0) = h(1) = 0 by continuity.
double binary_entropy(double x);

NormalizationPair normalization_factors(double mu);

// Default equal partition: every slot gets eps_sec / 10. The last slot
// absorbs the rounding residue so the sum identity is exact.
SecurityBudget epsilon_budget(double eps_sec, double eps_cor);

// Custom partition; eps_sec is derived from the slots.
SecurityBudget epsilon_budget_custom(double eps_cor, double eps_smooth,
                                     double eps0, double eps1, double eps2);

// Returns the parameters unchanged if every invariant holds; throws
// std::invalid_argument naming the violated invariant otherwise.
ProtocolParams validate_params(const ProtocolParams& params);

}  // namespace cowqkd
