#include "architecture.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace relaylock {

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::Differentiator: return "differentiator";
    case Architecture::Pdo: return "pdo";
    case Architecture::Custom: return "custom";
  }
  return "unknown";
}

std::optional<Architecture> parse_architecture(std::string_view name) {
  if (name == "differentiator" || name == "diff") return Architecture::Differentiator;
  if (name == "pdo") return Architecture::Pdo;
  if (name == "custom" || name == "custom-taps") return Architecture::Custom;
  return std::nullopt;
}

FeedbackFilter ArchParams::filter() const {
  switch (arch) {
    case Architecture::Differentiator: return FeedbackFilter::differentiator(m);
    case Architecture::Pdo: return FeedbackFilter::pure_delay(m);
    case Architecture::Custom: return FeedbackFilter(custom_taps);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown architecture");
}

DacModel ArchParams::dac() const {
  return big_m == 1 ? DacModel::hold() : DacModel::pulse(big_m);
}

int ArchParams::loop_sign() const {
  if (feedback_sign) return *feedback_sign;
  return arch == Architecture::Pdo ? -1 : 1;
}

double ArchParams::nominal_omega0() const { return 2.0 * std::numbers::pi * f0; }

ResonatorParams ArchParams::resonator(double omega0) const {
  return ResonatorParams::from_pulsation(omega0, q_factor, plant_gain);
}

int ArchParams::dominant_lock() const {
  return std::max(1, static_cast<int>(std::lround(oversampling / 2.0)));
}

LoopConfig ArchParams::loop_config(double omega0, StateVector initial_state) const {
  LoopConfig cfg{resonator(omega0), filter(), dac(), fs(), loop_sign(), 0, initial_state, 0};
  cfg.transient_skip = default_transient_skip(q_factor, oversampling);
  cfg.n_samples = cfg.transient_skip + kDefaultWindow;
  return cfg;
}

void ArchParams::validate() const {
  if (!(std::isfinite(f0) && f0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "f0 must be > 0");
  if (!(std::isfinite(q_factor) && q_factor > 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "Q must be > 0.5 (underdamped resonator)");
  }
  if (!(std::isfinite(oversampling) && oversampling > 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "oversampling Fs/F0 must be > 2");
  }
  if (big_m < 1) throw Error(ErrorCode::InvalidArgument, "pulse divisor M must be >= 1");
  if (feedback_sign && *feedback_sign != 1 && *feedback_sign != -1) {
    throw Error(ErrorCode::InvalidArgument, "feedback_sign must be +1 or -1");
  }
  (void)filter();
  (void)resonator(nominal_omega0());
}

}  // namespace relaylock
