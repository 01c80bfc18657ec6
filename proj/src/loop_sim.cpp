#include "loop_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "error.hpp"

namespace relaylock {

FeedbackFilter::FeedbackFilter(std::vector<FilterTap> taps) : taps_(std::move(taps)) {
  if (taps_.empty()) throw Error(ErrorCode::InvalidArgument, "filter needs at least one tap");
  std::set<int> seen;
  for (const auto& t : taps_) {
    if (t.delay < 0) throw Error(ErrorCode::InvalidArgument, "filter tap delay must be >= 0");
    if (!std::isfinite(t.coeff)) {
      throw Error(ErrorCode::InvalidArgument, "filter tap coefficient must be finite");
    }
    if (!seen.insert(t.delay).second) {
      throw Error(ErrorCode::InvalidArgument,
                  "duplicate filter tap delay " + std::to_string(t.delay));
    }
  }
}

FeedbackFilter FeedbackFilter::differentiator(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "differentiator requires m >= 1");
  return FeedbackFilter({{0, 1.0}, {m, -1.0}});
}

FeedbackFilter FeedbackFilter::pure_delay(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "pure delay requires m >= 1");
  return FeedbackFilter({{m, 1.0}});
}

int FeedbackFilter::max_delay() const {
  int d = 0;
  for (const auto& t : taps_) d = std::max(d, t.delay);
  return d;
}

double FeedbackFilter::dc_gain() const {
  double g = 0.0;
  for (const auto& t : taps_) g += t.coeff;
  return g;
}

FeedbackFilter FeedbackFilter::delayed(int extra) const {
  std::vector<FilterTap> out(taps_.begin(), taps_.end());
  for (auto& t : out) t.delay += extra;
  return FeedbackFilter(std::move(out));
}

DacModel DacModel::pulse(int divisor) {
  if (divisor < 1) throw Error(ErrorCode::InvalidArgument, "pulse divisor M must be >= 1");
  return {DacKind::Pulse, divisor};
}

void LoopConfig::validate() const {
  if (!(std::isfinite(fs) && fs > 2.0 * resonator.f0())) {
    throw Error(ErrorCode::InvalidArgument, "sampling frequency must exceed 2 f0");
  }
  if (feedback_sign != 1 && feedback_sign != -1) {
    throw Error(ErrorCode::InvalidArgument, "feedback_sign must be +1 or -1");
  }
  if (dac.pulse_divisor < 1) throw Error(ErrorCode::InvalidArgument, "pulse divisor M must be >= 1");
  if (transient_skip < 0) throw Error(ErrorCode::InvalidArgument, "transient_skip must be >= 0");
  if (n_samples <= transient_skip) {
    throw Error(ErrorCode::InvalidArgument, "n_samples must exceed transient_skip");
  }
  if (!std::isfinite(initial_state.w) || !std::isfinite(initial_state.v)) {
    throw Error(ErrorCode::InvalidArgument, "initial state must be finite");
  }
}

std::int64_t default_transient_skip(double q_factor, double oversampling) {
  const double cycles = std::ceil(10.0 * q_factor);
  return static_cast<std::int64_t>(std::ceil(cycles * oversampling));
}

namespace {

enum class Ordering { SampleThenCompare, CompareThenSample };

template <Ordering order>
SimTrace run_loop(const LoopConfig& cfg) {
  cfg.validate();
  const double ts = cfg.ts();
  const auto n = static_cast<std::size_t>(cfg.n_samples);
  const bool pulsed = cfg.dac.kind == DacKind::Pulse && cfg.dac.pulse_divisor > 1;
  const Transition active(cfg.resonator, pulsed ? ts / cfg.dac.pulse_divisor : ts);
  const Transition idle(cfg.resonator, pulsed ? ts - ts / cfg.dac.pulse_divisor : 0.0);

  const auto taps = cfg.filter.taps();
  const std::size_t depth = static_cast<std::size_t>(cfg.filter.max_delay()) + 1;
  // Circular sign history, pre-filled with the first comparator decision: the
  // loop is taken to be at rest before t = 0.
  std::vector<std::int8_t> history(depth, comparator(cfg.initial_state.w));
  std::size_t head = 0;

  SimTrace trace;
  trace.ts = ts;
  trace.signs.resize(n);
  trace.sampled_w.resize(n);
  trace.u.resize(n);

  StateVector x = cfg.initial_state;
  for (std::size_t i = 0; i < n; ++i) {
    std::int8_t s;
    if constexpr (order == Ordering::SampleThenCompare) {
      const double sample = x.w;
      trace.sampled_w[i] = sample;
      s = comparator(sample);
    } else {
      // The comparator acts on the continuous signal; its output is latched.
      const std::int8_t relay = comparator(x.w);
      trace.sampled_w[i] = x.w;
      s = relay;
    }
    trace.signs[i] = s;

    head = (head + depth - 1) % depth;
    history[head] = s;
    double u = 0.0;
    for (const auto& t : taps) {
      u += t.coeff * history[(head + static_cast<std::size_t>(t.delay)) % depth];
    }
    u *= cfg.feedback_sign;
    trace.u[i] = u;

    x = active.apply(x, u);
    if (pulsed) x = idle.apply(x, 0.0);
    if (!std::isfinite(x.w) || !std::isfinite(x.v)) {
      throw Error(ErrorCode::Numeric, "non-finite resonator state after sample " + std::to_string(i));
    }
  }
  trace.final_state = x;
  return trace;
}

}  // namespace

SimTrace simulate(const LoopConfig& config) {
  return run_loop<Ordering::SampleThenCompare>(config);
}

bool commutation_check(const LoopConfig& config) {
  const auto a = run_loop<Ordering::SampleThenCompare>(config);
  const auto b = run_loop<Ordering::CompareThenSample>(config);
  return a.signs == b.signs;
}

bool gain_invariance_check(const LoopConfig& config, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be > 0");
  LoopConfig scaled = config;
  scaled.resonator = config.resonator.with_gain(config.resonator.plant_gain() * lambda);
  scaled.initial_state = lambda * config.initial_state;
  return simulate(config).signs == simulate(scaled).signs;
}

std::int64_t minimal_period(std::span<const std::int8_t> s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  // Prefix function: the longest proper border of s has length n - q.
  std::vector<std::size_t> pi(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && s[i] != s[k]) k = pi[k - 1];
    if (s[i] == s[k]) ++k;
    pi[i] = k;
  }
  return static_cast<std::int64_t>(n - pi[n - 1]);
}

PeriodMeasurement measure_period(std::span<const std::int8_t> signs, double ts, std::int64_t skip,
                                 std::int64_t window) {
  if (skip < 0 || window <= 0) {
    throw Error(ErrorCode::InvalidArgument, "skip must be >= 0 and window > 0");
  }
  const auto total = static_cast<std::int64_t>(signs.size());
  if (skip >= total) throw Error(ErrorCode::InvalidArgument, "skip exceeds trace length");
  window = std::min(window, total - skip);
  const auto s = signs.subspan(static_cast<std::size_t>(skip), static_cast<std::size_t>(window));

  std::vector<std::int64_t> edges;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] < 0 && s[i] > 0) edges.push_back(static_cast<std::int64_t>(i));
  }
  if (edges.size() < 4) {
    throw Error(ErrorCode::NoOscillation,
                "no oscillation detected (" + std::to_string(edges.size()) + " rising edges)");
  }

  PeriodMeasurement m;
  m.rising_edges = static_cast<std::int64_t>(edges.size());
  m.mean_period = ts * static_cast<double>(edges.back() - edges.front()) /
                  static_cast<double>(edges.size() - 1);

  const std::int64_t q = minimal_period(s);
  if (q <= window / 2) {
    std::int64_t p = 0;
    for (std::int64_t i = 1; i <= q; ++i) {
      if (s[static_cast<std::size_t>(i - 1)] < 0 && s[static_cast<std::size_t>(i)] > 0) ++p;
    }
    if (p > 0) {
      const std::int64_t g = std::gcd(p, q);
      m.locked = true;
      m.period_samples = q;
      m.lock_ratio = LockRatio{p / g, q / g};
      m.mean_period = ts * static_cast<double>(q) / static_cast<double>(p);
    }
  }

  double jitter = 0.0;
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const double interval = ts * static_cast<double>(edges[i] - edges[i - 1]);
    jitter = std::max(jitter, std::abs(interval - m.mean_period));
  }
  m.jitter = jitter;
  return m;
}

PeriodMeasurement measure_period(const SimTrace& trace, std::int64_t skip, std::int64_t window) {
  return measure_period(trace.signs, trace.ts, skip, window);
}

}  // namespace relaylock
