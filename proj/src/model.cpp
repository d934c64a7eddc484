#include "cowqkd/model.hpp"

#include <cmath>
#include <stdexcept>

namespace cowqkd {

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("binary_entropy: argument outside [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

NormalizationPair normalization_factors(double mu) {
  if (!(mu >= 0.0)) {
    throw std::invalid_argument("normalization_factors: mu must be >= 0");
  }
  const double overlap = std::exp(-mu);
  return {2.0 * (1.0 + overlap), 2.0 * (1.0 - overlap)};
}

SecurityBudget epsilon_budget(double eps_sec, double eps_cor) {
  if (!(eps_sec > 0.0 && eps_sec <= 1.0)) {
    throw std::invalid_argument("epsilon_budget: eps_sec must be in (0, 1]");
  }
  if (!(eps_cor > 0.0 && eps_cor < 1.0)) {
    throw std::invalid_argument("epsilon_budget: eps_cor must be in (0, 1)");
  }
  const double slot = eps_sec / 10.0;
  // 9 slots at eps_sec/10; the tenth takes the exact remainder (Sterbenz:
  // the subtraction below is exact, so the stored sum reproduces eps_sec).
  const double nine = (2.0 * slot + slot) + 6.0 * slot;
  const double eps2 = eps_sec - nine;
  return SecurityBudget{eps_cor, eps_sec, slot, slot, slot, eps2};
}

SecurityBudget epsilon_budget_custom(double eps_cor, double eps_smooth,
                                     double eps0, double eps1, double eps2) {
  if (!(eps_cor > 0.0 && eps_cor < 1.0)) {
    throw std::invalid_argument("epsilon_budget_custom: eps_cor must be in (0, 1)");
  }
  for (double e : {eps_smooth, eps0, eps1, eps2}) {
    if (!(e > 0.0 && e < 1.0)) {
      throw std::invalid_argument("epsilon_budget_custom: every slot must be in (0, 1)");
    }
  }
  const double eps_sec = (2.0 * eps_smooth + eps0) + 6.0 * eps1 + eps2;
  if (!(eps_sec < 1.0)) {
    throw std::invalid_argument("epsilon_budget_custom: slots sum to >= 1");
  }
  return SecurityBudget{eps_cor, eps_sec, eps_smooth, eps0, eps1, eps2};
}

ProtocolParams validate_params(const ProtocolParams& params) {
  if (!(params.mu > 0.0) || !std::isfinite(params.mu)) {
    throw std::invalid_argument("params: mu must be positive and finite");
  }
  if (!(params.t_b > 0.0 && params.t_b < 1.0)) {
    throw std::invalid_argument("params: t_B must lie strictly inside (0,1)");
  }
  if (!(params.p_d1 > 0.0 && params.p_d1 < 1.0)) {
    throw std::invalid_argument("params: p_d1 must lie strictly inside (0,1)");
  }
  if (!(params.p_d2 > 0.0 && params.p_d2 < 1.0)) {
    throw std::invalid_argument("params: p_d2 must lie strictly inside (0,1)");
  }
  if (!(params.p_d1 + params.p_d2 < 1.0)) {
    throw std::invalid_argument("params: decoy probabilities sum >= 1");
  }
  if (params.n_rounds < 1) {
    throw std::invalid_argument("params: n_rounds must be >= 1");
  }
  if (!(params.detector.p_dark >= 0.0 && params.detector.p_dark < 1.0)) {
    throw std::invalid_argument("params: p_dark must lie in [0,1)");
  }
  if (!(params.detector.eta_det > 0.0 && params.detector.eta_det <= 1.0)) {
    throw std::invalid_argument("params: eta_det must lie in (0,1]");
  }
  if (!(params.e_mis >= 0.0 && params.e_mis <= 0.5)) {
    throw std::invalid_argument("params: e_d must lie in [0, 0.5]");
  }
  if (!(params.f_ec >= 1.0)) {
    throw std::invalid_argument("params: f_ec must be >= 1");
  }
  if (params.active_route_prob &&
      !(*params.active_route_prob > 0.0 && *params.active_route_prob < 1.0)) {
    throw std::invalid_argument("params: active route probability must lie in (0,1)");
  }
  return params;
}

}  // namespace cowqkd
