#include "cowqkd/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cowqkd/rng.hpp"

namespace cowqkd {

namespace {

constexpr std::int64_t kChunkRounds = 1 << 16;

double click_probability(double intensity, double p_dark) {
  return 1.0 - (1.0 - p_dark) * std::exp(-intensity);
}

// Resolved single-record probabilities for a detector pair seeing
// intensities (i0, i1): double clicks are assigned uniformly.
std::array<double, 2> resolve_pair(double i0, double i1, double p_dark) {
  const double c0 = click_probability(i0, p_dark);
  const double c1 = click_probability(i1, p_dark);
  return {c0 * (1.0 - c1) + 0.5 * c0 * c1, c1 * (1.0 - c0) + 0.5 * c0 * c1};
}

// Shared derivation for the deterministic gain table and the sampler, so the
// two cannot drift apart. "cond" entries are conditioned on the round being
// routed to the respective line (identical to the unconditional ones in
// passive mode, where every round feeds both lines).
struct ChannelLaw {
  GainTable gains;
  double route_to_data = 1.0;  // active mode only; 1 means passive
  double cond_z_correct = 0.0;
  double cond_z_wrong = 0.0;
  std::array<std::array<double, 2>, kNumStates> cond_mon{};
};

ChannelLaw derive_law(const ProtocolParams& p, double eta) {
  // eta == 0 is allowed here (blocked-channel edge case); scenarios keep the
  // stricter (0, 1] domain.
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("channel: transmittance must lie in [0, 1]");
  }
  const double p_dark = p.detector.p_dark;
  const bool active = p.basis == BasisMode::kActive;
  const double route = active ? p.route_prob() : 1.0;

  // Per-occupied-pulse mean photon numbers at the detectors.
  const double mu_line = p.mu * eta * p.detector.eta_det;
  const double mu_data = active ? mu_line : mu_line * p.t_b;
  const double mu_mon = active ? mu_line : mu_line * (1.0 - p.t_b);

  ChannelLaw law;
  law.route_to_data = route;

  // Data line: the occupied slot clicks against the signal, the vacuum slot
  // against dark counts alone; simultaneous clicks are coin-flipped and
  // misalignment flips an e_d fraction of correctly timed clicks.
  const double p_occ = click_probability(mu_data, p_dark);
  const double p_vac = click_probability(0.0, p_dark);
  const double timed = p_occ * (1.0 - p_vac) + 0.5 * p_occ * p_vac;
  const double mistimed = p_vac * (1.0 - p_occ) + 0.5 * p_occ * p_vac;
  law.cond_z_correct = timed * (1.0 - p.e_mis);
  law.cond_z_wrong = mistimed + p.e_mis * timed;
  law.gains.q_z_sig = route * (law.cond_z_correct + law.cond_z_wrong);
  law.gains.q_z_wrongslot = route * law.cond_z_wrong;

  // Monitoring line: the interferometer output gated on same-round
  // interference. A lone pulse splits evenly between the ports; the pulsed
  // decoy interferes with visibility 1 - 2 e_d toward M0; the vacuum decoy
  // leaves dark counts only.
  const auto signal = resolve_pair(0.5 * mu_mon, 0.5 * mu_mon, p_dark);
  law.cond_mon[state_index(SentState::kBit0)] = signal;
  law.cond_mon[state_index(SentState::kBit1)] = signal;
  law.cond_mon[state_index(SentState::kDecoyPulsed)] =
      resolve_pair(2.0 * mu_mon * (1.0 - p.e_mis), 2.0 * mu_mon * p.e_mis, p_dark);
  law.cond_mon[state_index(SentState::kDecoyVacuum)] = resolve_pair(0.0, 0.0, p_dark);

  const double mon_scale = active ? 1.0 - route : 1.0;
  for (int w = 0; w < kNumStates; ++w) {
    for (int i = 0; i < 2; ++i) {
      law.gains.q_mon[w][i] = mon_scale * law.cond_mon[w][i];
    }
  }
  return law;
}

void simulate_chunk(const ChannelLaw& law, const ProtocolParams& p, std::uint64_t seed,
                    std::uint64_t chunk_index, std::int64_t rounds, ClickCounts& out) {
  Rng rng(Rng::substream_seed(seed, chunk_index));
  const bool active = p.basis == BasisMode::kActive;
  const double p_z = p.p_z();
  const double cum_bit1 = 2.0 * p_z;
  const double cum_pulsed = cum_bit1 + p.p_d1;

  for (std::int64_t r = 0; r < rounds; ++r) {
    const double u_state = rng.uniform();
    SentState state;
    if (u_state < p_z) {
      state = SentState::kBit0;
    } else if (u_state < cum_bit1) {
      state = SentState::kBit1;
    } else if (u_state < cum_pulsed) {
      state = SentState::kDecoyPulsed;
    } else {
      state = SentState::kDecoyVacuum;
    }
    const int w = state_index(state);
    out.sent[w] += 1;
    const bool is_signal = state == SentState::kBit0 || state == SentState::kBit1;

    const double u_route = rng.uniform();
    const double u_outcome = rng.uniform();
    if (active) {
      if (u_route < law.route_to_data) {
        if (is_signal) {
          if (u_outcome < law.cond_z_correct) {
            out.data_clicks += 1;
          } else if (u_outcome < law.cond_z_correct + law.cond_z_wrong) {
            out.data_clicks += 1;
            out.data_errors += 1;
          }
        }
      } else {
        const auto& mon = law.cond_mon[w];
        if (u_outcome < mon[kM0]) {
          out.mon[w][kM0] += 1;
        } else if (u_outcome < mon[kM0] + mon[kM1]) {
          out.mon[w][kM1] += 1;
        }
      }
    } else {
      if (is_signal) {
        if (u_route < law.cond_z_correct) {
          out.data_clicks += 1;
        } else if (u_route < law.cond_z_correct + law.cond_z_wrong) {
          out.data_clicks += 1;
          out.data_errors += 1;
        }
      }
      const auto& mon = law.cond_mon[w];
      if (u_outcome < mon[kM0]) {
        out.mon[w][kM0] += 1;
      } else if (u_outcome < mon[kM0] + mon[kM1]) {
        out.mon[w][kM1] += 1;
      }
    }
  }
}

void accumulate(ClickCounts& total, const ClickCounts& part) {
  for (int w = 0; w < kNumStates; ++w) {
    total.sent[w] += part.sent[w];
    total.mon[w][kM0] += part.mon[w][kM0];
    total.mon[w][kM1] += part.mon[w][kM1];
  }
  total.data_clicks += part.data_clicks;
  total.data_errors += part.data_errors;
}

}  // namespace

ChannelScenario ChannelScenario::from_length_km(double length_km) {
  if (!(length_km >= 0.0) || !std::isfinite(length_km)) {
    throw std::invalid_argument("scenario: fiber length must be >= 0");
  }
  return ChannelScenario(length_km, std::pow(10.0, -0.016 * length_km));
}

ChannelScenario ChannelScenario::from_transmittance(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("scenario: transmittance must lie in (0, 1]");
  }
  return ChannelScenario(std::log10(eta) / -0.016, eta);
}

double system_transmittance(const ChannelScenario& scenario) {
  return scenario.transmittance();
}

RealCounts to_real(const ClickCounts& counts) {
  RealCounts real;
  for (int w = 0; w < kNumStates; ++w) {
    real.sent[w] = static_cast<double>(counts.sent[w]);
    real.mon[w][kM0] = static_cast<double>(counts.mon[w][kM0]);
    real.mon[w][kM1] = static_cast<double>(counts.mon[w][kM1]);
  }
  real.data_clicks = static_cast<double>(counts.data_clicks);
  real.data_errors = static_cast<double>(counts.data_errors);
  return real;
}

GainTable expected_gains(const ProtocolParams& params, double eta) {
  return derive_law(params, eta).gains;
}

RealCounts expected_counts(const ProtocolParams& params, double eta) {
  const GainTable gains = expected_gains(params, eta);
  const double n = static_cast<double>(params.n_rounds);
  const std::array<double, kNumStates> p_send{params.p_z(), params.p_z(), params.p_d1,
                                              params.p_d2};
  RealCounts counts;
  for (int w = 0; w < kNumStates; ++w) {
    counts.sent[w] = n * p_send[w];
    counts.mon[w][kM0] = counts.sent[w] * gains.q_mon[w][kM0];
    counts.mon[w][kM1] = counts.sent[w] * gains.q_mon[w][kM1];
  }
  const double signal_rounds = counts.sent[0] + counts.sent[1];
  counts.data_clicks = signal_rounds * gains.q_z_sig;
  counts.data_errors = signal_rounds * gains.q_z_wrongslot;
  return counts;
}

ClickCounts simulate_counts_serial(const ProtocolParams& params, double eta,
                                   std::uint64_t seed) {
  ClickCounts total;
  if (params.n_rounds <= 0) return total;
  const ChannelLaw law = derive_law(params, eta);
  const std::int64_t chunks = (params.n_rounds + kChunkRounds - 1) / kChunkRounds;
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::int64_t rounds =
        std::min<std::int64_t>(kChunkRounds, params.n_rounds - c * kChunkRounds);
    ClickCounts part;
    simulate_chunk(law, params, seed, static_cast<std::uint64_t>(c), rounds, part);
    accumulate(total, part);
  }
  return total;
}

ClickCounts simulate_counts(const ProtocolParams& params, double eta, std::uint64_t seed) {
  ClickCounts total;
  if (params.n_rounds <= 0) return total;
  const ChannelLaw law = derive_law(params, eta);
  const std::int64_t chunks = (params.n_rounds + kChunkRounds - 1) / kChunkRounds;
#pragma omp parallel
  {
    ClickCounts local;
#pragma omp for schedule(static) nowait
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::int64_t rounds =
          std::min<std::int64_t>(kChunkRounds, params.n_rounds - c * kChunkRounds);
      ClickCounts part;
      simulate_chunk(law, params, seed, static_cast<std::uint64_t>(c), rounds, part);
      accumulate(local, part);
    }
#pragma omp critical
    accumulate(total, local);
  }
  return total;
}

}  // namespace cowqkd
