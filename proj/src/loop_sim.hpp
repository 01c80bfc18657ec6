#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "resonator.hpp"

namespace relaylock {

struct FilterTap {
  int delay = 0;  // samples
  double coeff = 0.0;

  friend bool operator==(const FilterTap&, const FilterTap&) = default;
};

/// FIR feedback filter  G(z) = sum_k coeff_k z^-delay_k.
class FeedbackFilter {
 public:
  explicit FeedbackFilter(std::vector<FilterTap> taps);

  /// G(z) = 1 - z^-m
  static FeedbackFilter differentiator(int m);
  /// G(z) = z^-m
  static FeedbackFilter pure_delay(int m);

  std::span<const FilterTap> taps() const { return taps_; }
  int max_delay() const;
  double dc_gain() const;

  // Same filter with every tap delayed by `extra` more samples.
  FeedbackFilter delayed(int extra) const;

 private:
  std::vector<FilterTap> taps_;
};

enum class DacKind { Hold, Pulse };

// A pulse DAC emits a unit-amplitude pulse of width Ts/M starting at the
// sample instant, scaled by the filter output.
struct DacModel {
  DacKind kind = DacKind::Hold;
  int pulse_divisor = 1;

  static DacModel hold() { return {}; }
  static DacModel pulse(int divisor);

  double active_time(double ts) const {
    return kind == DacKind::Hold ? ts : ts / pulse_divisor;
  }
};

struct LoopConfig {
  ResonatorParams resonator;
  FeedbackFilter filter;
  DacModel dac;
  double fs = 0.0;
  int feedback_sign = 1;
  std::int64_t n_samples = 0;
  StateVector initial_state{1e-9, 0.0};
  std::int64_t transient_skip = 0;

  double ts() const { return 1.0 / fs; }
  void validate() const;
};

inline constexpr std::int64_t kDefaultWindow = 32768;
inline constexpr StateVector kDefaultKick{1e-9, 0.0};

/// ceil(10 Q) resonator cycles, expressed in samples.
std::int64_t default_transient_skip(double q_factor, double oversampling);

struct SimTrace {
  std::vector<std::int8_t> signs;
  std::vector<double> sampled_w;
  std::vector<double> u;  // filter output applied after each sample
  double ts = 0.0;
  StateVector final_state;
};

// Comparator output; sign(0) = +1.
inline std::int8_t comparator(double w) { return w >= 0.0 ? 1 : -1; }

SimTrace simulate(const LoopConfig& config);

/// Runs the loop once with the comparator ahead of the sampler and once behind
/// it, and reports whether the sign sequences agree bit for bit.
bool commutation_check(const LoopConfig& config);

/// Scales plant gain and initial state by lambda and reports whether the sign
/// sequence is unchanged.
bool gain_invariance_check(const LoopConfig& config, double lambda);

// Locked ratio expressed as rising edges per sample count, lowest terms.
struct LockRatio {
  std::int64_t edges = 0;
  std::int64_t samples = 0;

  double period_ratio() const { return static_cast<double>(samples) / edges; }
  bool is_even_integer() const { return edges == 1 && samples % 2 == 0; }

  friend bool operator==(const LockRatio&, const LockRatio&) = default;
};

struct PeriodMeasurement {
  double mean_period = 0.0;  // s
  std::optional<LockRatio> lock_ratio;
  bool locked = false;
  std::int64_t period_samples = 0;  // minimal period of the sign pattern, 0 if unlocked
  std::int64_t rising_edges = 0;
  double jitter = 0.0;  // s
};

/// Measures the comparator period over signs[skip, skip + window).
///
/// The window is locked when the sign sequence restricted to it is exactly
/// periodic with some period q <= window / 2. Throws NoOscillation when fewer
/// than four rising edges are present.
PeriodMeasurement measure_period(std::span<const std::int8_t> signs, double ts, std::int64_t skip,
                                 std::int64_t window);
PeriodMeasurement measure_period(const SimTrace& trace, std::int64_t skip, std::int64_t window);

/// Smallest q such that s[i] == s[i + q] for all valid i.
std::int64_t minimal_period(std::span<const std::int8_t> s);

}  // namespace relaylock
