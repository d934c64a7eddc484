#include "cowqkd/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cowqkd {

namespace {

enum Var { kVarMu = 0, kVarTb = 1, kVarPd1 = 2, kVarPd2 = 3 };

struct FreeVar {
  Var which;
  ParamRange range;
  bool log_scale;
};

// Coordinates live in the unit cube; log-scaled variables are mapped through
// exp so multiplicative parameters get geometric resolution.
double decode(const FreeVar& v, double x) {
  x = std::clamp(x, 0.0, 1.0);
  if (v.log_scale) {
    const double lo = std::log(v.range.lo);
    const double hi = std::log(v.range.hi);
    return std::exp(lo + x * (hi - lo));
  }
  return v.range.lo + x * (v.range.hi - v.range.lo);
}

ProtocolParams apply_point(const ProtocolParams& tmpl, const std::vector<FreeVar>& vars,
                           const std::vector<double>& x) {
  ProtocolParams p = tmpl;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const double value = decode(vars[i], x[i]);
    switch (vars[i].which) {
      case kVarMu: p.mu = value; break;
      case kVarTb: p.t_b = value; break;
      case kVarPd1: p.p_d1 = value; break;
      case kVarPd2: p.p_d2 = value; break;
    }
  }
  // Joint decoy constraint: shrink both proportionally if the box admits an
  // infeasible corner.
  const double decoy_sum = p.p_d1 + p.p_d2;
  if (decoy_sum >= 0.999) {
    const double scale = 0.999 / decoy_sum;
    p.p_d1 *= scale;
    p.p_d2 *= scale;
  }
  return p;
}

bool lexicographically_smaller(const ProtocolParams& a, const ProtocolParams& b) {
  if (a.mu != b.mu) return a.mu < b.mu;
  if (a.t_b != b.t_b) return a.t_b < b.t_b;
  if (a.p_d1 != b.p_d1) return a.p_d1 < b.p_d1;
  return a.p_d2 < b.p_d2;
}

struct Tracker {
  double best_rate = -1.0;
  ProtocolParams best_params;
  KeyRateResult best_result;
  int evaluations = 0;

  void offer(double rate, const ProtocolParams& p, const KeyRateResult& r) {
    if (rate > best_rate ||
        (rate == best_rate && lexicographically_smaller(p, best_params))) {
      best_rate = rate;
      best_params = p;
      best_result = r;
    }
  }
};

}  // namespace

OptimizationResult optimize(const ProtocolParams& tmpl, const ChannelScenario& scenario,
                            const OptimizationSpec& spec, const SecurityBudget& budget,
                            BoundEngine engine, PhaseTrialConvention convention) {
  for (const auto& range : {spec.mu, spec.t_b, spec.p_d1, spec.p_d2}) {
    if (!(range.lo > 0.0 && range.lo <= range.hi)) {
      throw std::invalid_argument("optimize: empty or invalid search box");
    }
  }

  const double eta = system_transmittance(scenario);
  std::vector<FreeVar> vars;
  if (spec.free_mu) vars.push_back({kVarMu, spec.mu, true});
  if (spec.free_t_b) vars.push_back({kVarTb, spec.t_b, false});
  if (spec.free_p_d1) vars.push_back({kVarPd1, spec.p_d1, true});
  if (spec.free_p_d2) vars.push_back({kVarPd2, spec.p_d2, true});

  Tracker tracker;
  tracker.best_params = validate_params(tmpl);

  auto evaluate = [&](const std::vector<double>& x) -> double {
    const ProtocolParams p = apply_point(tmpl, vars, x);
    validate_params(p);
    const KeyRateResult r = finite_key_rate(expected_counts(p, eta), p, budget, engine,
                                            convention);
    const double rate = r.aborted ? 0.0 : r.rate_per_pulse;
    tracker.evaluations += 1;
    tracker.offer(rate, p, r);
    return rate;
  };

  // Template evaluation anchors the "never worse than the template" contract.
  const KeyRateResult at_template =
      finite_key_rate(expected_counts(tmpl, eta), tmpl, budget, engine, convention);
  tracker.best_rate = at_template.aborted ? 0.0 : at_template.rate_per_pulse;
  tracker.best_result = at_template;

  if (spec.eval_budget <= 0 || vars.empty()) {
    return {tracker.best_params, tracker.best_result, 0};
  }

  const int dims = static_cast<int>(vars.size());
  const int grid_budget = std::max(spec.eval_budget * 3 / 5, 1);
  int per_dim = static_cast<int>(
      std::floor(std::pow(static_cast<double>(grid_budget), 1.0 / static_cast<double>(dims)) +
                 1e-9));
  while (std::pow(static_cast<double>(per_dim + 1), dims) <= static_cast<double>(grid_budget)) {
    ++per_dim;
  }
  per_dim = std::clamp(per_dim, 3, dims == 1 ? 64 : 12);

  std::vector<std::vector<double>> grid_points;
  std::vector<double> grid_rates;
  std::vector<int> idx(dims, 0);
  while (tracker.evaluations < grid_budget) {
    std::vector<double> x(dims);
    for (int d = 0; d < dims; ++d) {
      x[d] = per_dim == 1 ? 0.5
                          : static_cast<double>(idx[d]) / static_cast<double>(per_dim - 1);
    }
    grid_points.push_back(x);
    grid_rates.push_back(evaluate(x));

    int d = 0;
    while (d < dims && ++idx[d] == per_dim) {
      idx[d] = 0;
      ++d;
    }
    if (d == dims) break;
  }

  // Simplex refinement from the best grid starts.
  std::vector<std::size_t> order(grid_points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return grid_rates[a] > grid_rates[b]; });

  const int starts = std::min<int>(4, static_cast<int>(order.size()));
  for (int s = 0; s < starts && tracker.evaluations < spec.eval_budget; ++s) {
    const std::vector<double>& origin = grid_points[order[s]];
    const double step = 0.6 / static_cast<double>(per_dim);

    std::vector<std::vector<double>> simplex{origin};
    std::vector<double> values{grid_rates[order[s]]};
    for (int d = 0; d < dims; ++d) {
      std::vector<double> x = origin;
      x[d] = x[d] + step <= 1.0 ? x[d] + step : x[d] - step;
      simplex.push_back(x);
      if (tracker.evaluations >= spec.eval_budget) break;
      values.push_back(evaluate(x));
    }
    if (simplex.size() != static_cast<std::size_t>(dims) + 1) break;

    while (tracker.evaluations < spec.eval_budget) {
      std::vector<std::size_t> rank(simplex.size());
      for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
      std::stable_sort(rank.begin(), rank.end(),
                       [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
      const std::size_t best = rank.front();
      const std::size_t worst = rank.back();
      const std::size_t second_worst = rank[rank.size() - 2];
      if (values[best] - values[worst] < 1e-15 * std::max(values[best], 1e-30)) break;

      std::vector<double> centroid(dims, 0.0);
      for (std::size_t i = 0; i < simplex.size(); ++i) {
        if (i == worst) continue;
        for (int d = 0; d < dims; ++d) centroid[d] += simplex[i][d];
      }
      for (int d = 0; d < dims; ++d) centroid[d] /= static_cast<double>(dims);

      auto blend = [&](double coeff) {
        std::vector<double> x(dims);
        for (int d = 0; d < dims; ++d) {
          x[d] = std::clamp(centroid[d] + coeff * (centroid[d] - simplex[worst][d]), 0.0, 1.0);
        }
        return x;
      };

      const auto reflected = blend(1.0);
      const double fr = evaluate(reflected);
      if (fr > values[best] && tracker.evaluations < spec.eval_budget) {
        const auto expanded = blend(2.0);
        const double fe = evaluate(expanded);
        if (fe > fr) {
          simplex[worst] = expanded;
          values[worst] = fe;
        } else {
          simplex[worst] = reflected;
          values[worst] = fr;
        }
      } else if (fr > values[second_worst]) {
        simplex[worst] = reflected;
        values[worst] = fr;
      } else if (tracker.evaluations < spec.eval_budget) {
        const auto contracted = blend(-0.5);
        const double fc = evaluate(contracted);
        if (fc > values[worst]) {
          simplex[worst] = contracted;
          values[worst] = fc;
        } else {
          for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) continue;
            for (int d = 0; d < dims; ++d) {
              simplex[i][d] = std::clamp(
                  simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]), 0.0, 1.0);
            }
            if (tracker.evaluations >= spec.eval_budget) break;
            values[i] = evaluate(simplex[i]);
          }
        }
      }
    }
  }

  return {tracker.best_params, tracker.best_result, tracker.evaluations};
}

}  // namespace cowqkd
