#include "ct_equiv.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "error.hpp"

namespace relaylock {

void EquivalentLoop::validate() const {
  if (!(std::isfinite(ts) && ts > 0.0)) throw Error(ErrorCode::InvalidArgument, "ts must be > 0");
  if (!(phi0 >= 0.0 && phi0 <= ts)) {
    throw Error(ErrorCode::InvalidArgument, "phi0 must lie in [0, ts]");
  }
  if (feedback_sign != 1 && feedback_sign != -1) {
    throw Error(ErrorCode::InvalidArgument, "feedback_sign must be +1 or -1");
  }
}

EquivalentLoop equivalent_loop(const ArchParams& arch, double omega0, double phi0) {
  EquivalentLoop loop{arch.resonator(omega0), arch.filter(), arch.dac(), arch.ts(), phi0,
                      arch.loop_sign()};
  loop.validate();
  return loop;
}

std::vector<Segment> ForcingPattern::segments() const {
  std::vector<Segment> out;
  out.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out.push_back({breakpoints[i + 1] - breakpoints[i], levels[i]});
  }
  return out;
}

double ForcingPattern::level_at(double t) const {
  const double half = period / 2.0;
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  double sign = 1.0;
  if (r >= half) {
    r -= half;
    sign = -1.0;
  }
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), r);
  auto idx = static_cast<std::size_t>(std::distance(breakpoints.begin(), it));
  idx = std::clamp<std::size_t>(idx, 1, levels.size());
  return sign * levels[idx - 1];
}

namespace {

// Odd-periodic DAC output before filtering: +1 on the first half period,
// either held or as pulses of width ts/M starting on the sample grid.
double dac_wave(double tau, double period, double ts, const DacModel& dac) {
  const double half = period / 2.0;
  double r = std::fmod(tau, period);
  if (r < 0.0) r += period;
  double sign = 1.0;
  if (r >= half) {
    r -= half;
    sign = -1.0;
  }
  if (dac.kind == DacKind::Hold || dac.pulse_divisor == 1) return sign;
  const double pos = r - std::floor(r / ts) * ts;
  return pos < ts / dac.pulse_divisor ? sign : 0.0;
}

}  // namespace

ForcingPattern forcing_pattern(const EquivalentLoop& loop, double period, PulseGrid grid) {
  loop.validate();
  if (!(std::isfinite(period) && period > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "period must be > 0");
  }
  const double half = period / 2.0;
  const double ts = loop.ts;
  const bool pulsed = loop.dac.kind == DacKind::Pulse;
  if (pulsed && grid == PulseGrid::EvenLockOnly) {
    const double n = half / ts;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n) || std::round(n) < 1.0) {
      throw Error(ErrorCode::InvalidArgument, "pulse equivalent requires even lock");
    }
  }

  std::vector<double> cuts{0.0, half};
  auto add = [&](double t) {
    if (t > 0.0 && t < half) cuts.push_back(t);
  };
  const double pulse_width = ts / loop.dac.pulse_divisor;
  for (const FilterTap& tap : loop.filter.taps()) {
    const double delay = tap.delay * ts + loop.phi0;
    const auto j_lo = static_cast<long>(std::floor(-delay / half)) - 1;
    const auto j_hi = static_cast<long>(std::ceil((half - delay) / half)) + 1;
    for (long j = j_lo; j <= j_hi; ++j) {
      const double start = delay + static_cast<double>(j) * half;
      add(start);
      if (pulsed && loop.dac.pulse_divisor > 1) {
        for (long i = 0; static_cast<double>(i) * ts < half; ++i) {
          add(start + static_cast<double>(i) * ts);
          add(start + std::min(static_cast<double>(i) * ts + pulse_width, half));
        }
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  const double merge = 1e-12 * half;
  ForcingPattern pattern;
  pattern.period = period;
  for (double t : cuts) {
    if (pattern.breakpoints.empty() || t - pattern.breakpoints.back() > merge) {
      pattern.breakpoints.push_back(t);
    }
  }
  pattern.breakpoints.back() = half;

  for (std::size_t i = 0; i + 1 < pattern.breakpoints.size(); ++i) {
    const double mid = 0.5 * (pattern.breakpoints[i] + pattern.breakpoints[i + 1]);
    double u = 0.0;
    for (const FilterTap& tap : loop.filter.taps()) {
      u += tap.coeff * dac_wave(mid - (tap.delay * ts + loop.phi0), period, ts, loop.dac);
    }
    pattern.levels.push_back(loop.feedback_sign * u);
  }
  return pattern;
}

StateVector symmetric_boundary_state(const EquivalentLoop& loop, double period) {
  // Extended grid so the residual is continuous in T; exact on even locks.
  const auto pattern = forcing_pattern(loop, period, PulseGrid::Extended);
  const auto segs = pattern.segments();
  const StateVector forced = propagate_piecewise(loop.resonator, {}, segs);
  const Eigen::Matrix2d m = transition_matrix(loop.resonator, period / 2.0) +
                            Eigen::Matrix2d::Identity();
  const double det = m.determinant();
  if (!(std::abs(det) > 1e-300) || !std::isfinite(det)) {
    throw Error(ErrorCode::Degenerate, "degenerate period: (A + I) is singular");
  }
  const Eigen::Vector2d x0 = -m.partialPivLu().solve(Eigen::Vector2d(forced.w, forced.v));
  return {x0(0), x0(1)};
}

double switching_residual(const EquivalentLoop& loop, double period) {
  return symmetric_boundary_state(loop, period).w;
}

namespace {

constexpr int kCrossingSamples = 64;
constexpr double kCrossingTolerance = 1e-9;

// Scans w over (0, T/2) for a zero crossing: dense samples plus a refined
// search for interior minima of w between samples.
bool has_interior_crossing(const EquivalentLoop& loop, const ForcingPattern& pattern,
                           StateVector x0, double scale) {
  const double floor_w = -kCrossingTolerance * scale;
  const auto segs = pattern.segments();
  StateVector x = x0;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const Segment& seg = segs[k];
    const Transition step(loop.resonator, seg.duration / kCrossingSamples);
    StateVector prev = x;
    for (int i = 1; i <= kCrossingSamples; ++i) {
      const StateVector cur = step.apply(prev, seg.level);
      const bool at_end = (k + 1 == segs.size() && i == kCrossingSamples);
      if (!at_end && cur.w < floor_w) return true;
      if (prev.v < 0.0 && cur.v > 0.0) {
        // Local minimum of w inside (prev, cur): bisect on the velocity.
        double a = 0.0;
        double b = seg.duration / kCrossingSamples;
        StateVector at_min = prev;
        for (int it = 0; it < 60; ++it) {
          const double c = 0.5 * (a + b);
          const StateVector y = propagate_const_input(loop.resonator, prev, seg.level, c);
          if (y.v < 0.0) a = c; else b = c;
          at_min = y;
        }
        if (at_min.w < floor_w) return true;
      }
      prev = cur;
    }
    x = propagate_const_input(loop.resonator, x, seg.level, seg.duration);
  }
  return false;
}

}  // namespace

PeriodSolution evaluate_period(const EquivalentLoop& loop, double period) {
  const auto pattern = forcing_pattern(loop, period, PulseGrid::Extended);
  const StateVector x0 = symmetric_boundary_state(loop, period);
  const double w0 = loop.resonator.omega0();
  const auto segs = pattern.segments();
  const StateVector half = propagate_piecewise(loop.resonator, x0, segs);

  PeriodSolution sol;
  sol.period = period;
  sol.boundary_state = x0;
  sol.state_scale = std::hypot(x0.w, x0.v / w0);
  sol.switch_residual = std::abs(x0.w);
  sol.symmetry_residual = std::hypot(half.w + x0.w, (half.v + x0.v) / w0);
  sol.rising_slope = x0.v > 0.0;
  sol.interior_crossing = has_interior_crossing(loop, pattern, x0, sol.state_scale);
  const double tol = kResidualTolerance * sol.state_scale;
  sol.valid = sol.state_scale > 0.0 && sol.switch_residual <= tol &&
              sol.symmetry_residual <= tol && sol.rising_slope && !sol.interior_crossing;
  return sol;
}

PeriodSolution hamel_period(const EquivalentLoop& loop, Bracket bracket,
                            std::optional<double> target) {
  loop.validate();
  if (!(bracket.lo > 0.0 && bracket.lo < bracket.hi && std::isfinite(bracket.hi))) {
    throw Error(ErrorCode::InvalidArgument, "bracket must satisfy 0 < T_min < T_max");
  }
  const double goal = target.value_or(0.5 * (bracket.lo + bracket.hi));

  constexpr int kGrid = 256;
  std::vector<double> ts(kGrid + 1);
  std::vector<double> rs(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) {
    ts[i] = bracket.lo + (bracket.hi - bracket.lo) * i / kGrid;
    rs[i] = switching_residual(loop, ts[i]);
  }

  std::vector<double> roots;
  for (int i = 0; i < kGrid; ++i) {
    if (rs[i] == 0.0) {
      roots.push_back(ts[i]);
      continue;
    }
    if ((rs[i] < 0.0) == (rs[i + 1] < 0.0) || rs[i + 1] == 0.0) continue;
    double a = ts[i];
    double b = ts[i + 1];
    double ra = rs[i];
    while (b - a > 1e-14 * a) {
      const double c = 0.5 * (a + b);
      if (c <= a || c >= b) break;
      const double rc = switching_residual(loop, c);
      if (rc == 0.0) {
        a = b = c;
        break;
      }
      if ((rc < 0.0) == (ra < 0.0)) {
        a = c;
        ra = rc;
      } else {
        b = c;
      }
    }
    // Pick whichever end has the smaller residual.
    const double ea = std::abs(switching_residual(loop, a));
    const double eb = std::abs(switching_residual(loop, b));
    roots.push_back(ea <= eb ? a : b);
  }
  if (rs[kGrid] == 0.0) roots.push_back(ts[kGrid]);
  if (roots.empty()) {
    throw Error(ErrorCode::NoSolution, "no periodic solution in bracket");
  }

  std::sort(roots.begin(), roots.end(),
            [goal](double x, double y) { return std::abs(x - goal) < std::abs(y - goal); });
  std::optional<PeriodSolution> fallback;
  for (double r : roots) {
    PeriodSolution sol = evaluate_period(loop, r);
    if (sol.valid) return sol;
    if (!fallback) fallback = sol;
  }
  return *fallback;
}

namespace {

// Complex Fourier coefficients U_k (odd k) of the odd-periodic forcing,
// u(t) = sum_k U_k exp(j k omega t).
std::complex<double> forcing_coefficient(const ForcingPattern& pattern, int k) {
  const double omega = 2.0 * std::numbers::pi / pattern.period;
  const double kw = k * omega;
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < pattern.levels.size(); ++i) {
    const double a = pattern.breakpoints[i];
    const double b = pattern.breakpoints[i + 1];
    acc += pattern.levels[i] *
           (std::polar(1.0, -kw * a) - std::polar(1.0, -kw * b)) / std::complex<double>(0.0, kw);
  }
  return 2.0 / pattern.period * acc;
}

}  // namespace

double tsypkin_residual(const EquivalentLoop& loop, double period, int n_harmonics) {
  if (n_harmonics < 1) throw Error(ErrorCode::InvalidArgument, "n_harmonics must be >= 1");
  const auto pattern = forcing_pattern(loop, period, PulseGrid::Extended);
  const double omega = 2.0 * std::numbers::pi / period;
  // Smallest terms first.
  double sum = 0.0;
  for (int i = n_harmonics - 1; i >= 0; --i) {
    const int k = 2 * i + 1;
    const auto term = forcing_coefficient(pattern, k) * freq_response(loop.resonator, k * omega);
    sum += 2.0 * term.real();
  }
  return sum;
}

double first_harmonic_amplitude(const EquivalentLoop& loop, double period) {
  const auto pattern = forcing_pattern(loop, period, PulseGrid::Extended);
  const double omega = 2.0 * std::numbers::pi / period;
  return 2.0 * std::abs(forcing_coefficient(pattern, 1) * freq_response(loop.resonator, omega));
}

double PeriodInterval::lower() const { return std::min(t0(), t1()); }
double PeriodInterval::upper() const { return std::max(t0(), t1()); }

bool PeriodInterval::contains(double period, double slack) const {
  return period >= lower() - slack && period <= upper() + slack;
}

PeriodInterval period_interval(const ArchParams& arch, double omega0) {
  arch.validate();
  const double ts = arch.ts();
  const double natural = 2.0 * std::numbers::pi / omega0;
  const double n = std::max(1.0, std::round(natural / (2.0 * ts)));
  const double target = 2.0 * n * ts;
  const Bracket bracket{0.5 * target, 1.5 * target};

  PeriodInterval out;
  out.at_zero = hamel_period(equivalent_loop(arch, omega0, 0.0), bracket, target);
  out.at_ts = hamel_period(equivalent_loop(arch, omega0, ts), bracket, target);
  if (!out.at_zero.valid || !out.at_ts.valid) {
    throw Error(ErrorCode::NoSolution, "no valid periodic solution near T = " +
                                           std::to_string(target) + " s");
  }
  return out;
}

}  // namespace relaylock
