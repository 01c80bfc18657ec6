#pragma once

#include <optional>
#include <vector>

#include "architecture.hpp"
#include "resonator.hpp"

namespace relaylock {

// Continuous-time stand-in for the sampled loop: the sample-and-hold stage is
// replaced by a pure delay phi0 in [0, ts] between the relay switching and
// the DAC output.
struct EquivalentLoop {
  ResonatorParams resonator;
  FeedbackFilter filter;
  DacModel dac;
  double ts = 0.0;
  double phi0 = 0.0;
  int feedback_sign = 1;

  void validate() const;
};

EquivalentLoop equivalent_loop(const ArchParams& arch, double omega0, double phi0);

// Forcing over one half period [0, T/2]; the second half is its negation.
struct ForcingPattern {
  std::vector<double> breakpoints;  // 0 = b_0 < b_1 < ... < b_n = T/2
  std::vector<double> levels;       // levels[i] applies on [b_i, b_{i+1})
  double period = 0.0;

  std::vector<Segment> segments() const;
  double level_at(double t) const;
};

enum class PulseGrid {
  // Pulse forcing only defined when T/2 is a whole number of samples.
  EvenLockOnly,
  // Pulse train truncated at T/2; matches EvenLockOnly on even locks and is
  // continuous in T in between, which the period root finder relies on.
  Extended,
};

ForcingPattern forcing_pattern(const EquivalentLoop& loop, double period,
                               PulseGrid grid = PulseGrid::EvenLockOnly);

struct PeriodSolution {
  double period = 0.0;
  StateVector boundary_state;  // state at the rising relay switch, t = 0
  double switch_residual = 0.0;
  double symmetry_residual = 0.0;
  double state_scale = 0.0;  // sqrt(w^2 + (v / omega0)^2) at t = 0
  bool interior_crossing = false;
  bool rising_slope = false;
  bool valid = false;
};

inline constexpr double kResidualTolerance = 1e-10;

/// State x(0) of the odd-symmetric orbit x(T/2) = -x(0) driven by the
/// forcing pattern for period T. Its w component is the switching residual.
StateVector symmetric_boundary_state(const EquivalentLoop& loop, double period);
double switching_residual(const EquivalentLoop& loop, double period);

/// Builds and checks the candidate orbit at `period` without root finding.
PeriodSolution evaluate_period(const EquivalentLoop& loop, double period);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Symmetric periodic regime of the equivalent loop with T in `bracket`,
/// solved exactly in the time domain. Among several roots the valid one
/// nearest `target` (default: bracket centre) wins; if none is valid the
/// nearest root is returned with valid = false.
PeriodSolution hamel_period(const EquivalentLoop& loop, Bracket bracket,
                            std::optional<double> target = std::nullopt);

/// Plant output at the switching instant from the truncated harmonic series
/// of the forcing (n_harmonics odd harmonics). Vanishes at a true periodic
/// solution as n_harmonics grows.
double tsypkin_residual(const EquivalentLoop& loop, double period, int n_harmonics);

/// Amplitude of the first-harmonic component of w for the same forcing.
double first_harmonic_amplitude(const EquivalentLoop& loop, double period);

struct PeriodInterval {
  PeriodSolution at_zero;  // phi0 = 0
  PeriodSolution at_ts;    // phi0 = ts

  double t0() const { return at_zero.period; }
  double t1() const { return at_ts.period; }
  double lower() const;
  double upper() const;
  bool contains(double period, double slack = 0.0) const;
};

/// Periods at phi0 = 0 and phi0 = ts around the even lock nearest the
/// natural period of the resonator at omega0.
PeriodInterval period_interval(const ArchParams& arch, double omega0);

}  // namespace relaylock
