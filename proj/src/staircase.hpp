#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "architecture.hpp"
#include "loop_sim.hpp"

namespace relaylock {

enum class SweepPolicy { FixedInitialState, Continuation };

std::string_view to_string(SweepPolicy policy);
std::optional<SweepPolicy> parse_policy(std::string_view name);

struct SimSettings {
  std::optional<std::int64_t> transient_skip;  // default: ceil(10 Q) cycles
  std::int64_t window = kDefaultWindow;
  StateVector initial_state = kDefaultKick;

  LoopConfig loop_config(const ArchParams& arch, double omega0) const;
};

struct StaircaseRow {
  double omega0 = 0.0;
  double mean_period = 0.0;  // NaN when no oscillation was detected
  std::optional<LockRatio> ratio;
  bool locked = false;
  std::string status = "ok";

  // T / Ts as a reduced fraction; zero when unlocked.
  std::int64_t ratio_num() const { return ratio ? ratio->samples : 0; }
  std::int64_t ratio_den() const { return ratio ? ratio->edges : 0; }
};

// Sensor response: measured comparator period against resonator pulsation.
struct StaircaseDataset {
  ArchParams params;
  SweepPolicy policy = SweepPolicy::FixedInitialState;
  SimSettings settings;
  double omega_start = 0.0;  // sweep runs from start to end
  double omega_end = 0.0;
  int n_points = 0;
  std::vector<StaircaseRow> rows;  // sorted by omega0
};

/// Simulates and measures the loop at n_points pulsations evenly spaced over
/// [omega_start, omega_end]. The grid depends only on the range endpoints, so
/// the direction matters only for the continuation policy, which seeds each
/// run with the previous run's final state.
StaircaseDataset staircase_sweep(const ArchParams& arch, double omega_start, double omega_end,
                                 int n_points, SweepPolicy policy = SweepPolicy::FixedInitialState,
                                 SimSettings settings = {});

/// Re-sweeps [omega_lo, omega_hi] with the dataset's own point budget.
StaircaseDataset zoom(const StaircaseDataset& dataset, double omega_lo, double omega_hi);

// Run of consecutive locked rows sharing one ratio.
struct Plateau {
  std::size_t first = 0;
  std::size_t last = 0;
  LockRatio ratio;
  double omega_lo = 0.0;
  double omega_hi = 0.0;

  std::size_t size() const { return last - first + 1; }
};

std::vector<Plateau> plateaus(const StaircaseDataset& dataset);
/// Widest plateau (ties broken by lower omega0).
std::optional<Plateau> dominant_plateau(const StaircaseDataset& dataset);

/// Row indices where the period grows with omega0, i.e. where the response
/// breaks the expected non-increasing trend.
std::vector<std::size_t> monotonicity_anomalies(const StaircaseDataset& dataset);

}  // namespace relaylock
