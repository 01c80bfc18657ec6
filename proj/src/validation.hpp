#pragma once

#include <string>
#include <vector>

#include "architecture.hpp"
#include "staircase.hpp"

namespace relaylock {

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const;
};

struct ValidationSettings {
  double tsypkin_tolerance = 1e-6;  // relative to the first-harmonic amplitude
  int harmonics = 10000;
  double interval_slack = 1e-9;  // in units of ts
  SimSettings sim;
};

/// Cross-checks simulation, the exact periodic solver and the harmonic series
/// on the dominant lock of `arch`:
///  - the loop simulated at the step midpoint locks at exactly 2 N Ts,
///  - 2 N Ts lies in [T0, T1] at that pulsation,
///  - the series residual at both solver periods is below tolerance,
///  - simulations ten granularity units outside the step do not lock at 2 N.
ValidationReport run_validation(const ArchParams& arch, const ValidationSettings& settings = {});

}  // namespace relaylock
