#include "staircase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "parallel.hpp"

namespace relaylock {

std::string_view to_string(SweepPolicy policy) {
  return policy == SweepPolicy::Continuation ? "continuation" : "fixed";
}

std::optional<SweepPolicy> parse_policy(std::string_view name) {
  if (name == "fixed" || name == "fixed-initial-state") return SweepPolicy::FixedInitialState;
  if (name == "continuation") return SweepPolicy::Continuation;
  return std::nullopt;
}

LoopConfig SimSettings::loop_config(const ArchParams& arch, double omega0) const {
  LoopConfig cfg = arch.loop_config(omega0, initial_state);
  if (transient_skip) cfg.transient_skip = *transient_skip;
  cfg.n_samples = cfg.transient_skip + window;
  return cfg;
}

namespace {

StaircaseRow measure_point(const LoopConfig& cfg, double omega0, std::int64_t window,
                           StateVector* final_state) {
  StaircaseRow row;
  row.omega0 = omega0;
  const SimTrace trace = simulate(cfg);
  if (final_state) *final_state = trace.final_state;
  try {
    const auto m = measure_period(trace, cfg.transient_skip, window);
    row.mean_period = m.mean_period;
    row.locked = m.locked;
    row.ratio = m.lock_ratio;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoOscillation) throw;
    row.mean_period = std::numeric_limits<double>::quiet_NaN();
    row.status = e.what();
  }
  return row;
}

}  // namespace

StaircaseDataset staircase_sweep(const ArchParams& arch, double omega_start, double omega_end,
                                 int n_points, SweepPolicy policy, SimSettings settings) {
  arch.validate();
  if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "n_points must be >= 2");
  if (!(omega_start > 0.0 && omega_end > 0.0) || omega_start == omega_end) {
    throw Error(ErrorCode::InvalidArgument, "omega range must be positive and non-empty");
  }
  if (settings.window < 8) throw Error(ErrorCode::InvalidArgument, "window must be >= 8");

  StaircaseDataset ds;
  ds.params = arch;
  ds.policy = policy;
  ds.settings = settings;
  ds.omega_start = omega_start;
  ds.omega_end = omega_end;
  ds.n_points = n_points;
  ds.rows.resize(static_cast<std::size_t>(n_points));

  const double lo = std::min(omega_start, omega_end);
  const double hi = std::max(omega_start, omega_end);
  auto omega_at = [&](std::size_t i) {
    if (i + 1 == ds.rows.size()) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
  };

  if (policy == SweepPolicy::FixedInitialState) {
    parallel_for(ds.rows.size(), [&](std::size_t i) {
      const double w = omega_at(i);
      ds.rows[i] = measure_point(settings.loop_config(arch, w), w, settings.window, nullptr);
    });
  } else {
    StateVector seed = settings.initial_state;
    const bool ascending = omega_start < omega_end;
    for (std::size_t k = 0; k < ds.rows.size(); ++k) {
      const std::size_t i = ascending ? k : ds.rows.size() - 1 - k;
      const double w = omega_at(i);
      LoopConfig cfg = settings.loop_config(arch, w);
      cfg.initial_state = seed;
      ds.rows[i] = measure_point(cfg, w, settings.window, &seed);
    }
  }
  return ds;
}

StaircaseDataset zoom(const StaircaseDataset& dataset, double omega_lo, double omega_hi) {
  const double lo = std::min(dataset.omega_start, dataset.omega_end);
  const double hi = std::max(dataset.omega_start, dataset.omega_end);
  if (!(omega_lo >= lo && omega_hi <= hi && omega_lo < omega_hi)) {
    throw Error(ErrorCode::InvalidArgument, "zoom region must lie within the original sweep");
  }
  const bool ascending = dataset.omega_start < dataset.omega_end;
  return staircase_sweep(dataset.params, ascending ? omega_lo : omega_hi,
                         ascending ? omega_hi : omega_lo, dataset.n_points, dataset.policy,
                         dataset.settings);
}

std::vector<Plateau> plateaus(const StaircaseDataset& dataset) {
  std::vector<Plateau> out;
  const auto& rows = dataset.rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].locked) continue;
    if (!out.empty() && out.back().last + 1 == i && out.back().ratio == *rows[i].ratio) {
      out.back().last = i;
      out.back().omega_hi = rows[i].omega0;
    } else {
      out.push_back({i, i, *rows[i].ratio, rows[i].omega0, rows[i].omega0});
    }
  }
  return out;
}

std::optional<Plateau> dominant_plateau(const StaircaseDataset& dataset) {
  std::optional<Plateau> best;
  for (const auto& p : plateaus(dataset)) {
    if (!best || p.size() > best->size()) best = p;
  }
  return best;
}

std::vector<std::size_t> monotonicity_anomalies(const StaircaseDataset& dataset) {
  std::vector<std::size_t> out;
  const auto& rows = dataset.rows;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!rows[i].locked || !rows[i - 1].locked) continue;
    if (rows[i].mean_period > rows[i - 1].mean_period) out.push_back(i);
  }
  return out;
}

}  // namespace relaylock
