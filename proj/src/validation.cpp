#include "validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ct_equiv.hpp"
#include "error.hpp"
#include "resolution.hpp"

namespace relaylock {

bool ValidationReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

// Ratio label of a simulated point, or the failure reason.
std::string simulate_ratio(const ArchParams& arch, const SimSettings& sim, double omega0,
                           std::optional<LockRatio>* out) {
  const LoopConfig cfg = sim.loop_config(arch, omega0);
  try {
    const auto m = measure_period(simulate(cfg), cfg.transient_skip, sim.window);
    *out = m.lock_ratio;
    if (!m.lock_ratio) return "unlocked";
    return std::to_string(m.lock_ratio->samples) + "/" + std::to_string(m.lock_ratio->edges);
  } catch (const Error& e) {
    out->reset();
    return e.what();
  }
}

}  // namespace

ValidationReport run_validation(const ArchParams& arch, const ValidationSettings& settings) {
  ValidationReport report;
  StepBounds bounds;
  try {
    bounds = step_bounds(arch);
  } catch (const Error& e) {
    report.checks.push_back({"step_bounds", false, e.what()});
    return report;
  }
  report.checks.push_back({"step_bounds", true,
                           "omega in [" + fmt(bounds.omega_low) + ", " + fmt(bounds.omega_high) +
                               "] rad/s, relative width " + fmt(bounds.relative_width)});

  const double mid = 0.5 * (bounds.omega_low + bounds.omega_high);
  const LockRatio expected{1, 2 * bounds.n_lock};
  {
    std::optional<LockRatio> r;
    const std::string label = simulate_ratio(arch, settings.sim, mid, &r);
    report.checks.push_back({"simulation_lock", r && *r == expected,
                             "midpoint ratio " + label + ", expected " +
                                 std::to_string(2 * bounds.n_lock) + "/1"});
  }

  try {
    const PeriodInterval iv = period_interval(arch, mid);
    const double slack = settings.interval_slack * arch.ts();
    report.checks.push_back({"period_interval", iv.contains(bounds.t_target, slack),
                             "2N Ts = " + fmt(bounds.t_target) + " s, [T0, T1] = [" +
                                 fmt(iv.t0()) + ", " + fmt(iv.t1()) + "] s"});

    double worst = 0.0;
    for (const auto& [sol, phi0] : {std::pair{iv.at_zero, 0.0}, std::pair{iv.at_ts, arch.ts()}}) {
      const auto loop = equivalent_loop(arch, mid, phi0);
      const double rel = std::abs(tsypkin_residual(loop, sol.period, settings.harmonics)) /
                         first_harmonic_amplitude(loop, sol.period);
      worst = std::max(worst, rel);
    }
    report.checks.push_back({"tsypkin_residual", worst <= settings.tsypkin_tolerance,
                             "relative residual " + fmt(worst) + " with " +
                                 std::to_string(settings.harmonics) + " harmonics, tolerance " +
                                 fmt(settings.tsypkin_tolerance)});
  } catch (const Error& e) {
    report.checks.push_back({"period_interval", false, e.what()});
  }

  {
    const double delta = bounds.width / 100.0;
    std::optional<LockRatio> below;
    std::optional<LockRatio> above;
    const std::string lo = simulate_ratio(arch, settings.sim, bounds.omega_low - 10 * delta, &below);
    const std::string hi = simulate_ratio(arch, settings.sim, bounds.omega_high + 10 * delta, &above);
    const bool ok = !(below && *below == expected) && !(above && *above == expected);
    report.checks.push_back({"step_bracketing", ok, "outside the step: below " + lo + ", above " + hi});
  }
  return report;
}

}  // namespace relaylock
