#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "architecture.hpp"
#include "error.hpp"
#include "loop_sim.hpp"

using namespace relaylock;

namespace {

std::vector<std::int8_t> cycles(const std::vector<int>& lengths, int repeats) {
  std::vector<std::int8_t> s;
  for (int r = 0; r < repeats; ++r) {
    for (int len : lengths) {
      const int hi = len / 2;
      for (int i = 0; i < len; ++i) s.push_back(i < hi ? 1 : -1);
    }
  }
  return s;
}

ArchParams pdo() { return ArchParams{}; }
ArchParams diff(int m = 1) {
  ArchParams a;
  a.arch = Architecture::Differentiator;
  a.m = m;
  return a;
}

}  // namespace

TEST_CASE("filter constructors and validation") {
  const auto d = FeedbackFilter::differentiator(2);
  REQUIRE(d.taps().size() == 2);
  CHECK(d.dc_gain() == 0.0);
  CHECK(d.max_delay() == 2);
  const auto p = FeedbackFilter::pure_delay(3);
  CHECK(p.dc_gain() == 1.0);
  CHECK(p.delayed(2).max_delay() == 5);
  CHECK_THROWS_AS(FeedbackFilter({}), Error);
  CHECK_THROWS_AS(FeedbackFilter({{-1, 1.0}}), Error);
  CHECK_THROWS_AS(FeedbackFilter({{1, 1.0}, {1, 2.0}}), Error);
  CHECK_THROWS_AS(FeedbackFilter({{1, NAN}}), Error);
  CHECK_THROWS_AS(FeedbackFilter::differentiator(0), Error);
  CHECK_THROWS_AS(DacModel::pulse(0), Error);
}

TEST_CASE("measure_period on a synthetic square wave") {
  const double ts = 1e-6;
  const auto s = cycles({12}, 400);
  const auto m = measure_period(s, ts, 0, static_cast<std::int64_t>(s.size()));
  CHECK(m.locked);
  REQUIRE(m.lock_ratio);
  CHECK(m.lock_ratio->edges == 1);
  CHECK(m.lock_ratio->samples == 12);
  CHECK(m.lock_ratio->period_ratio() == 12.0);
  CHECK(m.mean_period == doctest::Approx(12 * ts).epsilon(1e-15));
  CHECK(m.period_samples == 12);
  CHECK(m.jitter == doctest::Approx(0.0));
}

TEST_CASE("measure_period on alternating 12 and 14 sample cycles") {
  const double ts = 1e-6;
  const auto s = cycles({12, 14}, 300);
  const auto m = measure_period(s, ts, 5, static_cast<std::int64_t>(s.size()) - 5);
  CHECK(m.locked);
  CHECK(m.period_samples == 26);
  REQUIRE(m.lock_ratio);
  // Stored in lowest terms: 26 samples per 2 edges.
  CHECK(m.lock_ratio->edges == 1);
  CHECK(m.lock_ratio->samples == 13);
  CHECK(m.rising_edges > 500);
  CHECK(m.lock_ratio->period_ratio() == 13.0);
  CHECK_FALSE(m.lock_ratio->is_even_integer());
  CHECK(m.mean_period == doctest::Approx(13 * ts).epsilon(1e-15));
  CHECK(m.jitter > 0.0);
}

TEST_CASE("measure_period errors and unlocked sequences") {
  std::vector<std::int8_t> flat(1000, 1);
  CHECK_THROWS_AS(measure_period(flat, 1e-6, 0, 1000), Error);
  // Growing cycle lengths never repeat.
  std::vector<int> lens;
  for (int i = 0; i < 60; ++i) lens.push_back(10 + (i % 7) + i / 20);
  const auto s = cycles(lens, 1);
  const auto m = measure_period(s, 1e-6, 0, static_cast<std::int64_t>(s.size()));
  CHECK_FALSE(m.locked);
  CHECK_FALSE(m.lock_ratio);
  CHECK(minimal_period(cycles({8}, 10)) == 8);
}

TEST_CASE("reference configurations oscillate with rational locks") {
  for (const auto& arch : {pdo(), diff()}) {
    const auto cfg = arch.loop_config(arch.nominal_omega0());
    const auto trace = simulate(cfg);
    CHECK(trace.signs.size() == static_cast<std::size_t>(cfg.n_samples));
    const auto m = measure_period(trace, cfg.transient_skip, kDefaultWindow);
    CHECK(m.rising_edges > 1000);
    CHECK(m.mean_period / cfg.ts() == doctest::Approx(12.0).epsilon(0.01));
  }
  // Inside the PDO m=2 step the lock is an even integer.
  const auto a = pdo();
  const auto cfg = a.loop_config(0.9995 * a.nominal_omega0());
  const auto m = measure_period(simulate(cfg), cfg.transient_skip, kDefaultWindow);
  REQUIRE(m.lock_ratio);
  CHECK(m.lock_ratio->is_even_integer());
  CHECK(m.lock_ratio->samples == 12);
}

TEST_CASE("loop is odd-symmetric in the initial state") {
  const auto a = pdo();
  auto cfg = a.loop_config(a.nominal_omega0());
  const auto t1 = simulate(cfg);
  cfg.initial_state = -1.0 * cfg.initial_state;
  const auto t2 = simulate(cfg);
  REQUIRE(t1.signs.size() == t2.signs.size());
  bool negated = true;
  for (std::size_t i = 0; i < t1.signs.size(); ++i) negated &= t1.signs[i] == -t2.signs[i];
  CHECK(negated);
  const auto m1 = measure_period(t1, cfg.transient_skip, kDefaultWindow);
  const auto m2 = measure_period(t2, cfg.transient_skip, kDefaultWindow);
  CHECK(m1.mean_period == m2.mean_period);
}

TEST_CASE("zero state with a zero-DC filter stays at rest") {
  auto cfg = diff().loop_config(diff().nominal_omega0(), {0.0, 0.0});
  const auto trace = simulate(cfg);
  CHECK(std::all_of(trace.sampled_w.begin(), trace.sampled_w.end(),
                    [](double w) { return w == 0.0; }));
  CHECK(std::all_of(trace.signs.begin(), trace.signs.end(), [](auto s) { return s == 1; }));
  CHECK(std::all_of(trace.u.begin(), trace.u.end(), [](double u) { return u == 0.0; }));
  CHECK_THROWS_AS(measure_period(trace, cfg.transient_skip, kDefaultWindow), Error);
}

TEST_CASE("comparator commutes with the sampler") {
  CHECK(commutation_check(pdo().loop_config(pdo().nominal_omega0())));
  CHECK(commutation_check(diff().loop_config(diff().nominal_omega0())));
  auto p4 = pdo();
  p4.big_m = 4;
  CHECK(commutation_check(p4.loop_config(p4.nominal_omega0())));
}

TEST_CASE("sign sequence is invariant under gain scaling") {
  for (const auto& a : {pdo(), diff()}) {
    const auto cfg = a.loop_config(a.nominal_omega0());
    CHECK(gain_invariance_check(cfg, 1.0));
    CHECK(gain_invariance_check(cfg, 1e3));
    CHECK(gain_invariance_check(cfg, 1e-3));
  }
}

TEST_CASE("pulse DAC with M = 1 reproduces hold bit for bit") {
  for (auto a : {pdo(), diff(2)}) {
    const auto hold = a.loop_config(1.001 * a.nominal_omega0());
    auto pulse = hold;
    pulse.dac = DacModel::pulse(1);
    const auto th = simulate(hold), tp = simulate(pulse);
    CHECK(th.signs == tp.signs);
    CHECK(th.sampled_w == tp.sampled_w);
    CHECK(th.u == tp.u);
  }
}

TEST_CASE("simulation is deterministic") {
  auto a = pdo();
  a.big_m = 8;
  const auto cfg = a.loop_config(0.998 * a.nominal_omega0());
  const auto t1 = simulate(cfg), t2 = simulate(cfg);
  CHECK(t1.sampled_w == t2.sampled_w);
  CHECK(t1.final_state == t2.final_state);
}

TEST_CASE("invalid loop configurations are rejected") {
  auto cfg = pdo().loop_config(pdo().nominal_omega0());
  cfg.fs = 0.0;
  CHECK_THROWS_AS(simulate(cfg), Error);
  cfg = pdo().loop_config(pdo().nominal_omega0());
  cfg.n_samples = 0;
  CHECK_THROWS_AS(simulate(cfg), Error);
  cfg = pdo().loop_config(pdo().nominal_omega0());
  cfg.feedback_sign = 0;
  CHECK_THROWS_AS(simulate(cfg), Error);
}
