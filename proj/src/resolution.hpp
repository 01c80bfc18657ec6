#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "architecture.hpp"
#include "ct_equiv.hpp"

namespace relaylock {

struct CurvePoint {
  double omega0 = 0.0;
  std::optional<PeriodSolution> solution;  // absent when the solver failed
  std::string status = "ok";

  bool valid() const { return solution && solution->valid; }
};

/// Period of the equivalent loop at fixed phi0 across [omega_lo, omega_hi],
/// solved around the lock T = 2 N ts (N defaults to the dominant lock).
/// Invalid or failed points are flagged, never filled in.
std::vector<CurvePoint> period_curve(const ArchParams& arch, double phi0, double omega_lo,
                                     double omega_hi, int n_points,
                                     std::optional<int> n_lock = std::nullopt);

struct StepBounds {
  int n_lock = 0;
  double t_target = 0.0;  // 2 N ts
  double omega_low = 0.0;
  double omega_high = 0.0;
  double width = 0.0;
  double relative_width = 0.0;  // width / sqrt(omega_low omega_high)
  double phi0_at_low = 0.0;     // which delay endpoint produced omega_low
};

/// Edges of the omega0 interval locked at T = 2 N ts: the pulsations where
/// the phi0 = 0 and phi0 = ts equivalents oscillate with exactly that period.
StepBounds step_bounds(const ArchParams& arch, std::optional<int> n_lock = std::nullopt);

/// Sampled-loop state one sample before the rising switch of the symmetric
/// orbit locked at T = 2 N ts, for use as a simulation initial state. Empty
/// when no delay phi0 in [0, ts] yields a valid orbit with that period, or when
/// the filter reaches back past the previous half period.
std::optional<StateVector> locked_orbit_state(const ArchParams& arch, double omega0,
                                              std::optional<int> n_lock = std::nullopt);

struct ResolutionRow {
  ArchParams params;
  int n_lock = 0;
  std::optional<StepBounds> bounds;
  std::string status = "ok";
};

using ResolutionTable = std::vector<ResolutionRow>;

/// step_bounds for every (m, M) pair, m-major. Failed rows keep their status.
ResolutionTable resolution_curve(const ArchParams& base, std::span<const int> m_values,
                                 std::span<const int> big_m_values);

enum class Verdict { PdoBetter, DifferentiatorBetter, Tie, Undecided };

std::string_view to_string(Verdict v);

struct ComparisonEntry {
  int m = 0;
  int big_m = 0;
  std::optional<double> differentiator_width;  // relative widths
  std::optional<double> pdo_width;
  Verdict verdict = Verdict::Undecided;
};

struct ComparisonReport {
  ResolutionTable differentiator;
  ResolutionTable pdo;
  std::vector<ComparisonEntry> entries;

  int count(Verdict v) const;
};

ComparisonReport compare_architectures(const ArchParams& base, std::span<const int> m_values,
                                       std::span<const int> big_m_values);

}  // namespace relaylock
