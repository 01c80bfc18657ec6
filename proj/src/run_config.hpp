#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "architecture.hpp"
#include "staircase.hpp"

namespace relaylock {

enum class OutputFormat { Csv, Json };

// Everything a CLI run needs. Populated from a flat key=value file and
// individual overrides; later assignments win.
struct RunConfig {
  ArchParams arch;
  StateVector initial_state = kDefaultKick;
  int points = 2000;
  double range_pct = 5.0;
  std::optional<double> omega_lo;  // explicit sweep range, rad/s
  std::optional<double> omega_hi;
  double omega0_scale = 1.0;  // simulate runs at nominal omega0 times this
  SweepPolicy policy = SweepPolicy::FixedInitialState;
  std::string out = "-";
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::int64_t> transient_skip;
  std::int64_t window = kDefaultWindow;
  std::vector<int> m_values{1, 2, 3};
  std::vector<int> big_m_values;  // empty: just arch.big_m
  std::optional<int> n_lock;
  double tolerance = 1e-6;
  int harmonics = 10000;

  /// Applies one assignment. `line` (when > 0) is quoted in error messages.
  void set(std::string_view key, std::string_view value, int line = 0);
  void load_file(const std::string& path);
  void load_text(std::string_view text);

  /// Checks every module-level invariant; throws Error(Config) naming the
  /// offending field (and its source line when it came from a file).
  void validate() const;

  SimSettings sim_settings() const;
  double simulate_omega0() const;
  std::pair<double, double> sweep_range() const;
  LoopConfig loop_config() const;
  std::vector<int> resolved_big_m_values() const;

  static std::vector<std::string> known_keys();

 private:
  [[noreturn]] void fail(std::string_view field, const std::string& message) const;

  std::map<std::string, int, std::less<>> origin_;  // field -> source line
};

}  // namespace relaylock
