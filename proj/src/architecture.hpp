#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "loop_sim.hpp"

namespace relaylock {

enum class Architecture { Differentiator, Pdo, Custom };

std::string_view to_string(Architecture arch);
std::optional<Architecture> parse_architecture(std::string_view name);

// Architecture plus the operating point it is studied at. The nominal
// resonator runs at f0; sweeps vary omega0 around 2 pi f0.
struct ArchParams {
  Architecture arch = Architecture::Pdo;
  int m = 2;
  int big_m = 1;  // pulse divisor; 1 means zero-order hold
  double q_factor = 250.0;
  double oversampling = 12.0;  // Fs / F0
  double f0 = 35.8e3;
  double plant_gain = 1.0;
  std::optional<int> feedback_sign;
  std::vector<FilterTap> custom_taps;

  FeedbackFilter filter() const;
  DacModel dac() const;
  // Polarity that sustains oscillation: +1 for 1 - z^-m, -1 for z^-m.
  int loop_sign() const;
  double fs() const { return oversampling * f0; }
  double ts() const { return 1.0 / fs(); }
  double nominal_omega0() const;
  ResonatorParams resonator(double omega0) const;
  // Dominant even lock N (T = 2 N Ts) at nominal parameters.
  int dominant_lock() const;

  LoopConfig loop_config(double omega0, StateVector initial_state = kDefaultKick) const;

  void validate() const;
};

}  // namespace relaylock
