#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "resolution.hpp"
#include "staircase.hpp"

using namespace relaylock;

namespace {
ArchParams pdo() { return ArchParams{}; }
}  // namespace

TEST_CASE("policy names round trip") {
  for (auto p : {SweepPolicy::FixedInitialState, SweepPolicy::Continuation}) {
    CHECK(parse_policy(to_string(p)) == p);
  }
  CHECK_FALSE(parse_policy("bogus"));
}

TEST_CASE("sweep grid and ordering") {
  const auto a = pdo();
  const double w = a.nominal_omega0();
  const auto ds = staircase_sweep(a, 0.99 * w, 1.01 * w, 11);
  REQUIRE(ds.rows.size() == 11);
  CHECK(ds.rows.front().omega0 == 0.99 * w);
  CHECK(ds.rows.back().omega0 == 1.01 * w);
  for (std::size_t i = 1; i < ds.rows.size(); ++i) CHECK(ds.rows[i].omega0 > ds.rows[i - 1].omega0);
  CHECK_THROWS_AS(staircase_sweep(a, w, w, 11), Error);
  CHECK_THROWS_AS(staircase_sweep(a, 0.9 * w, w, 0), Error);
}

TEST_CASE("reversed fixed-policy sweep is identical") {
  const auto a = pdo();
  const double w = a.nominal_omega0();
  const auto fwd = staircase_sweep(a, 0.98 * w, 1.02 * w, 24);
  const auto rev = staircase_sweep(a, 1.02 * w, 0.98 * w, 24);
  REQUIRE(fwd.rows.size() == rev.rows.size());
  for (std::size_t i = 0; i < fwd.rows.size(); ++i) {
    CHECK(fwd.rows[i].omega0 == rev.rows[i].omega0);
    CHECK(fwd.rows[i].ratio == rev.rows[i].ratio);
    CHECK((fwd.rows[i].mean_period == rev.rows[i].mean_period));
  }
}

TEST_CASE("continuation policy runs and locks inside the step") {
  const auto a = pdo();
  const auto b = step_bounds(a);
  const auto ds = staircase_sweep(a, b.omega_low + 0.2 * b.width, b.omega_high - 0.2 * b.width, 6,
                                  SweepPolicy::Continuation);
  for (const auto& r : ds.rows) {
    CHECK(r.locked);
    CHECK(r.ratio_num() == 12);
    CHECK(r.ratio_den() == 1);
  }
}

TEST_CASE("the locked orbit exists and is stable across the whole step") {
  for (auto arch : {Architecture::Pdo, Architecture::Differentiator}) {
    for (int m : {1, 2, 3}) {
      for (int big_m : {1, 4}) {
        auto a = pdo();
        a.arch = arch;
        a.m = m;
        a.big_m = big_m;
        const auto b = step_bounds(a);
        for (int i = 0; i < 25; ++i) {
          const double w = b.omega_low + b.width * (0.02 + 0.96 * i / 24.0);
          const auto seed = locked_orbit_state(a, w);
          REQUIRE(seed);
          const auto cfg = a.loop_config(w, *seed);
          const auto meas = measure_period(simulate(cfg), cfg.transient_skip, kDefaultWindow);
          REQUIRE(meas.lock_ratio);
          CHECK(meas.lock_ratio->samples == 2 * b.n_lock);
          CHECK(meas.lock_ratio->edges == 1);
          CHECK(meas.mean_period == doctest::Approx(b.t_target).epsilon(1e-12));
        }
        // Outside the step there is no such orbit.
        CHECK_FALSE(locked_orbit_state(a, b.omega_low - 0.05 * b.width));
        CHECK_FALSE(locked_orbit_state(a, b.omega_high + 0.05 * b.width));
      }
    }
  }
}

TEST_CASE("the default kick locks across the reference step") {
  const auto a = pdo();
  const auto b = step_bounds(a);
  const auto ds =
      staircase_sweep(a, b.omega_low + 0.02 * b.width, b.omega_high - 0.02 * b.width, 25);
  for (const auto& r : ds.rows) {
    CHECK(r.locked);
    CHECK(r.ratio_num() == 2 * b.n_lock);
    CHECK(r.ratio_den() == 1);
    CHECK(r.mean_period == doctest::Approx(b.t_target).epsilon(1e-12));
  }
}

TEST_CASE("near some step edges the locked orbit coexists with another regime") {
  auto a = pdo();
  a.m = 1;
  const auto b = step_bounds(a);
  const double w = b.omega_low + 0.06 * b.width;
  const auto kicked = a.loop_config(w);
  const auto m1 = measure_period(simulate(kicked), kicked.transient_skip, kDefaultWindow);
  const auto seeded = a.loop_config(w, *locked_orbit_state(a, w));
  const auto m2 = measure_period(simulate(seeded), seeded.transient_skip, kDefaultWindow);
  REQUIRE(m1.lock_ratio);
  REQUIRE(m2.lock_ratio);
  CHECK(m1.lock_ratio->edges > 1);
  CHECK(*m2.lock_ratio == LockRatio{1, 12});
}

TEST_CASE("zoom reuses the point budget and agrees on shared points") {
  const auto a = pdo();
  const double w = a.nominal_omega0();
  const auto ds = staircase_sweep(a, 0.99 * w, 1.01 * w, 21);
  const auto same = zoom(ds, 0.99 * w, 1.01 * w);
  REQUIRE(same.rows.size() == ds.rows.size());
  for (std::size_t i = 0; i < ds.rows.size(); ++i) CHECK(same.rows[i].ratio == ds.rows[i].ratio);

  const auto z = zoom(ds, ds.rows[5].omega0, ds.rows[15].omega0);
  REQUIRE(z.rows.size() == 21);
  CHECK(z.rows.front().omega0 == ds.rows[5].omega0);
  CHECK(z.rows.front().ratio == ds.rows[5].ratio);
  CHECK(z.rows.back().ratio == ds.rows[15].ratio);
}

TEST_CASE("zoom at a plateau edge shows finer rational sub-steps") {
  const auto a = pdo();
  const auto b = step_bounds(a);
  const auto ds = staircase_sweep(a, b.omega_high, b.omega_high + 0.6 * b.width, 40);
  int fractional = 0;
  for (const auto& r : ds.rows) {
    if (r.locked && r.ratio_den() > 1) ++fractional;
  }
  CHECK(fractional > 0);
  CHECK(plateaus(ds).size() >= 2);
}

TEST_CASE("plateau extraction on a constructed dataset") {
  StaircaseDataset ds;
  auto row = [](double w, std::int64_t edges, std::int64_t samples) {
    StaircaseRow r;
    r.omega0 = w;
    r.locked = edges > 0;
    if (r.locked) r.ratio = LockRatio{edges, samples};
    r.mean_period = r.locked ? static_cast<double>(samples) / edges : 13.3;
    return r;
  };
  ds.rows = {row(1, 1, 14), row(2, 1, 14), row(3, 0, 0), row(4, 2, 25),
             row(5, 1, 12), row(6, 1, 12), row(7, 1, 12), row(8, 1, 14)};
  const auto ps = plateaus(ds);
  REQUIRE(ps.size() == 4);
  const auto dom = dominant_plateau(ds);
  REQUIRE(dom);
  CHECK(dom->ratio == LockRatio{1, 12});
  CHECK(dom->size() == 3);
  CHECK(dom->omega_lo == 5);
  CHECK(dom->omega_hi == 7);
  const auto anomalies = monotonicity_anomalies(ds);
  REQUIRE(anomalies.size() == 1);
  CHECK(anomalies[0] == 7);
}
