#pragma once

#include <array>
#include <cstdint>

#include "cowqkd/model.hpp"

namespace cowqkd {

// Two-pulse states, in the emission order |0>|a>, |a>|0>, |a>|a>, |0>|0>.
enum class SentState : int { kBit0 = 0, kBit1 = 1, kDecoyPulsed = 2, kDecoyVacuum = 3 };
inline constexpr int kNumStates = 4;
inline constexpr std::array<SentState, kNumStates> kAllStates{
    SentState::kBit0, SentState::kBit1, SentState::kDecoyPulsed, SentState::kDecoyVacuum};
inline constexpr int state_index(SentState s) { return static_cast<int>(s); }

// Monitoring-line detectors; M0 is the constructive port for |a>|a>.
inline constexpr int kM0 = 0;
inline constexpr int kM1 = 1;

// Fiber length or direct transmittance, exactly one of which is given.
class ChannelScenario {
 public:
  static ChannelScenario from_length_km(double length_km);
  static ChannelScenario from_transmittance(double eta);

  double length_km() const { return length_km_; }
  double transmittance() const { return eta_; }

 private:
  ChannelScenario(double length_km, double eta) : length_km_(length_km), eta_(eta) {}
  double length_km_;
  double eta_;
};

double system_transmittance(const ChannelScenario& scenario);

// Expected per-round click probabilities under the honest channel model.
// q_mon entries are recorded-window probabilities after the double-click
// random-assignment rule, so q_mon[w][kM0] + q_mon[w][kM1] <= 1.
struct GainTable {
  double q_z_sig = 0.0;        // data-line click probability for a signal round
  double q_z_wrongslot = 0.0;  // ... and the recorded bit is wrong
  std::array<std::array<double, 2>, kNumStates> q_mon{};
};

// Per-run counters. sent[w] is the number of rounds in which state w was
// emitted; mon[w][i] the recorded monitoring clicks; data_clicks the sifted
// key size n_z; data_errors the wrong-bit subset of it.
template <typename T>
struct CountTable {
  std::array<T, kNumStates> sent{};
  std::array<std::array<T, 2>, kNumStates> mon{};
  T data_clicks{};
  T data_errors{};

  T total_rounds() const { return sent[0] + sent[1] + sent[2] + sent[3]; }
};

using ClickCounts = CountTable<std::int64_t>;
using RealCounts = CountTable<double>;

RealCounts to_real(const ClickCounts& counts);

GainTable expected_gains(const ProtocolParams& params, double eta);

// Deterministic N * p_send * gain table, the input for key-rate curves.
RealCounts expected_counts(const ProtocolParams& params, double eta);

// Samples params.n_rounds independent rounds. Deterministic for a fixed
// seed; the parallel and serial versions produce identical counts because
// rounds are drawn in fixed-size chunks with per-chunk substreams.
ClickCounts simulate_counts(const ProtocolParams& params, double eta, std::uint64_t seed);
ClickCounts simulate_counts_serial(const ProtocolParams& params, double eta,
                                   std::uint64_t seed);

}  // namespace cowqkd
