#include "resolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "parallel.hpp"

namespace relaylock {

std::vector<CurvePoint> period_curve(const ArchParams& arch, double phi0, double omega_lo,
                                     double omega_hi, int n_points, std::optional<int> n_lock) {
  arch.validate();
  if (!(omega_lo > 0.0 && omega_hi > omega_lo)) {
    throw Error(ErrorCode::InvalidArgument, "omega range must be positive and increasing");
  }
  if (n_points < 2) throw Error(ErrorCode::InvalidArgument, "n_points must be >= 2");
  const double target = 2.0 * n_lock.value_or(arch.dominant_lock()) * arch.ts();
  const Bracket bracket{0.5 * target, 1.5 * target};

  std::vector<CurvePoint> curve(static_cast<std::size_t>(n_points));
  parallel_for(curve.size(), [&](std::size_t i) {
    CurvePoint& pt = curve[i];
    pt.omega0 = omega_lo + (omega_hi - omega_lo) * static_cast<double>(i) / (n_points - 1);
    try {
      pt.solution = hamel_period(equivalent_loop(arch, pt.omega0, phi0), bracket, target);
      if (!pt.solution->valid) pt.status = "invalid solution";
    } catch (const Error& e) {
      pt.status = e.what();
    }
  });
  return curve;
}

namespace {

// Search window multipliers: omega0 in [nominal / (1 + r), nominal (1 + r)].
constexpr double kWindows[] = {0.2, 0.3, 0.45, 0.675, 1.0};
constexpr double kLogGridStep = 1e-4;

struct EdgeSearch {
  const ArchParams& arch;
  double period;
  double phi0;

  double residual(double omega0) const {
    return switching_residual(equivalent_loop(arch, omega0, phi0), period);
  }

  double refine(double a, double b, double ra) const {
    for (int it = 0; it < 200; ++it) {
      const double c = 0.5 * (a + b);
      if (c <= a || c >= b) break;
      const double rc = residual(c);
      if (rc == 0.0) return c;
      if ((rc < 0.0) == (ra < 0.0)) {
        a = c;
        ra = rc;
      } else {
        b = c;
      }
    }
    return std::abs(residual(a)) <= std::abs(residual(b)) ? a : b;
  }

  // Valid root nearest the nominal pulsation (in log distance), if any.
  std::optional<double> nearest_root(double lo, double hi, double nominal) const {
    const auto n = static_cast<int>(std::ceil(std::log(hi / lo) / kLogGridStep));
    std::vector<double> grid(static_cast<std::size_t>(n) + 1);
    std::vector<double> res(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      grid[i] = lo * std::exp(std::log(hi / lo) * static_cast<double>(i) / n);
      res[i] = residual(grid[i]);
    });

    std::vector<std::pair<double, double>> cells;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      if (res[i] == 0.0 || (res[i] < 0.0) != (res[i + 1] < 0.0)) {
        cells.emplace_back(grid[i], grid[i + 1]);
      }
    }
    std::sort(cells.begin(), cells.end(), [nominal](const auto& x, const auto& y) {
      return std::abs(std::log(0.5 * (x.first + x.second) / nominal)) <
             std::abs(std::log(0.5 * (y.first + y.second) / nominal));
    });
    for (const auto& [a, b] : cells) {
      const double root = refine(a, b, residual(a));
      if (evaluate_period(equivalent_loop(arch, root, phi0), period).valid) return root;
    }
    return std::nullopt;
  }
};

}  // namespace

StepBounds step_bounds(const ArchParams& arch, std::optional<int> n_lock) {
  arch.validate();
  const int n = n_lock.value_or(arch.dominant_lock());
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "lock index N must be >= 1");
  const double ts = arch.ts();
  const double period = 2.0 * n * ts;
  const double nominal = arch.nominal_omega0();

  for (double r : kWindows) {
    const double lo = nominal / (1.0 + r);
    const double hi = nominal * (1.0 + r);
    const auto at_zero = EdgeSearch{arch, period, 0.0}.nearest_root(lo, hi, nominal);
    if (!at_zero) continue;
    const auto at_ts = EdgeSearch{arch, period, ts}.nearest_root(lo, hi, nominal);
    if (!at_ts) continue;

    StepBounds b;
    b.n_lock = n;
    b.t_target = period;
    b.omega_low = std::min(*at_zero, *at_ts);
    b.omega_high = std::max(*at_zero, *at_ts);
    b.phi0_at_low = *at_zero <= *at_ts ? 0.0 : ts;
    b.width = b.omega_high - b.omega_low;
    b.relative_width = b.width / std::sqrt(b.omega_low * b.omega_high);
    return b;
  }
  throw Error(ErrorCode::NoSolution,
              "lock not reachable: no valid step edge for T = " + std::to_string(2 * n) + " Ts");
}

std::optional<StateVector> locked_orbit_state(const ArchParams& arch, double omega0,
                                              std::optional<int> n_lock) {
  arch.validate();
  const int n = n_lock.value_or(arch.dominant_lock());
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "lock index N must be >= 1");
  // The run starts with a filter history of equal signs, which only matches the
  // orbit if every tap still sees the previous half period.
  if (arch.filter().max_delay() + 1 >= n) return std::nullopt;
  const double ts = arch.ts();
  const double period = 2.0 * n * ts;

  auto residual = [&](double phi0) {
    return switching_residual(equivalent_loop(arch, omega0, phi0), period);
  };
  double a = 0.0, b = ts;
  double ra = residual(a);
  const double rb = residual(b);
  if (ra == 0.0) {
    b = a;
  } else if (rb != 0.0) {
    if ((ra < 0.0) == (rb < 0.0)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
      const double c = 0.5 * (a + b);
      if (c <= a || c >= b) break;
      const double rc = residual(c);
      if ((rc < 0.0) == (ra < 0.0)) {
        a = c;
        ra = rc;
      } else {
        b = c;
      }
    }
  }
  const double phi0 = b;
  const auto loop = equivalent_loop(arch, omega0, phi0);
  const auto sol = evaluate_period(loop, period);
  if (!sol.valid) return std::nullopt;

  // Run the orbit forward to the sample at phi0 - ts of the next cycle.
  auto half = forcing_pattern(loop, period, PulseGrid::Extended).segments();
  std::vector<Segment> path;
  double remaining = period - ts + phi0;
  for (int sign : {1, -1}) {
    for (const auto& seg : half) {
      const double d = std::min(seg.duration, remaining);
      if (d <= 0.0) break;
      path.push_back({d, sign * seg.level});
      remaining -= d;
    }
  }
  return propagate_piecewise(loop.resonator, sol.boundary_state, path);
}

ResolutionTable resolution_curve(const ArchParams& base, std::span<const int> m_values,
                                 std::span<const int> big_m_values) {
  ResolutionTable table;
  for (int m : m_values) {
    for (int big_m : big_m_values) {
      ResolutionRow row;
      row.params = base;
      row.params.m = m;
      row.params.big_m = big_m;
      row.n_lock = base.dominant_lock();
      table.push_back(std::move(row));
    }
  }
  for (auto& row : table) {
    try {
      row.bounds = step_bounds(row.params, row.n_lock);
    } catch (const Error& e) {
      row.status = e.what();
    }
  }
  return table;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::PdoBetter: return "pdo";
    case Verdict::DifferentiatorBetter: return "differentiator";
    case Verdict::Tie: return "tie";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

int ComparisonReport::count(Verdict v) const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                        [v](const ComparisonEntry& e) { return e.verdict == v; }));
}

ComparisonReport compare_architectures(const ArchParams& base, std::span<const int> m_values,
                                       std::span<const int> big_m_values) {
  ArchParams diff = base;
  diff.arch = Architecture::Differentiator;
  diff.feedback_sign.reset();
  ArchParams pdo = base;
  pdo.arch = Architecture::Pdo;
  pdo.feedback_sign.reset();

  ComparisonReport report;
  report.differentiator = resolution_curve(diff, m_values, big_m_values);
  report.pdo = resolution_curve(pdo, m_values, big_m_values);
  for (std::size_t i = 0; i < report.differentiator.size(); ++i) {
    const auto& d = report.differentiator[i];
    const auto& p = report.pdo[i];
    ComparisonEntry e;
    e.m = d.params.m;
    e.big_m = d.params.big_m;
    if (d.bounds) e.differentiator_width = d.bounds->relative_width;
    if (p.bounds) e.pdo_width = p.bounds->relative_width;
    if (e.differentiator_width && e.pdo_width) {
      if (*e.pdo_width < *e.differentiator_width) e.verdict = Verdict::PdoBetter;
      else if (*e.pdo_width > *e.differentiator_width) e.verdict = Verdict::DifferentiatorBetter;
      else e.verdict = Verdict::Tie;
    }
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace relaylock
