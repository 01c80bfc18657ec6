#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ct_equiv.hpp"
#include "loop_sim.hpp"
#include "oracles.hpp"
#include "resolution.hpp"
#include "resonator.hpp"

using namespace relaylock;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}
double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng()); }
double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
int pick(int lo, int hi) { return std::uniform_int_distribution<>(lo, hi)(rng()); }

}  // namespace

TEST_CASE("semigroup and linearity over random resonators") {
  for (int trial = 0; trial < 200; ++trial) {
    const double w0 = log_uniform(1.0, 1e7);
    const auto p = ResonatorParams::from_pulsation(w0, log_uniform(0.6, 1e5), uniform(-3, 3) + 3.5);
    const double a = log_uniform(1e-3, 10.0) / w0, b = log_uniform(1e-3, 10.0) / w0;
    const double u = uniform(-2, 2);
    const StateVector x{uniform(-1, 1) / (w0 * w0), uniform(-1, 1) / w0};
    const auto two = propagate_const_input(p, propagate_const_input(p, x, u, a), u, b);
    const auto one = propagate_const_input(p, x, u, a + b);
    const double scale = std::hypot(one.w, one.v / w0) + std::abs(p.plant_gain() * u) / (w0 * w0);
    CHECK(std::hypot(two.w - one.w, (two.v - one.v) / w0) <= 1e-12 * scale);
  }
}

TEST_CASE("closed form tracks RK4 on random resonators") {
  for (int trial = 0; trial < 20; ++trial) {
    const double w0 = log_uniform(1.0, 1e6);
    const double q = log_uniform(0.6, 1e4);
    const auto p = ResonatorParams::from_pulsation(w0, q);
    const double dt = log_uniform(0.05, 3.0) / w0;
    const StateVector x{uniform(-1, 1), uniform(-1, 1) * w0};
    const double u = uniform(-1, 1) * w0 * w0;
    const auto e = propagate_const_input(p, x, u, dt);
    const auto r = oracle::rk4(w0, p.xi(), 1.0, x, u, dt, 20000);
    CHECK(std::hypot(e.w - r.w, (e.v - r.v) / w0) <= 1e-9 * std::hypot(r.w, r.v / w0) + 1e-12);
  }
}

TEST_CASE("minimal period of random periodic sign sequences") {
  for (int trial = 0; trial < 200; ++trial) {
    const int q = pick(1, 40);
    std::vector<std::int8_t> block(q);
    for (auto& s : block) s = pick(0, 1) ? 1 : -1;
    std::vector<std::int8_t> seq;
    const int reps = pick(2, 20);
    for (int r = 0; r < reps; ++r) seq.insert(seq.end(), block.begin(), block.end());
    seq.insert(seq.end(), block.begin(), block.begin() + pick(0, q - 1));
    const auto p = minimal_period(seq);
    CHECK(q % p == 0);
    for (std::size_t i = 0; i + p < seq.size(); ++i) CHECK(seq[i] == seq[i + p]);
  }
}

TEST_CASE("gain scaling and commutation hold over random loops") {
  for (int trial = 0; trial < 12; ++trial) {
    ArchParams a;
    a.arch = pick(0, 1) ? Architecture::Pdo : Architecture::Differentiator;
    a.m = pick(1, 3);
    a.big_m = std::vector{1, 2, 4, 8}[pick(0, 3)];
    a.q_factor = log_uniform(2.0, 1000.0);
    a.oversampling = uniform(6.0, 20.0);
    auto cfg = a.loop_config(a.nominal_omega0() * uniform(0.9, 1.1));
    cfg.n_samples = 20000;
    cfg.transient_skip = 0;
    CHECK(commutation_check(cfg));
    CHECK(gain_invariance_check(cfg, log_uniform(1e-4, 1e4)));
  }
}

TEST_CASE("valid equivalent-loop solutions satisfy the orbit invariants") {
  int valid = 0;
  for (int trial = 0; trial < 60; ++trial) {
    ArchParams a;
    a.arch = pick(0, 1) ? Architecture::Pdo : Architecture::Differentiator;
    a.m = pick(1, 3);
    a.big_m = std::vector{1, 2, 4}[pick(0, 2)];
    a.q_factor = log_uniform(2.5, 1000.0);
    const double w0 = a.nominal_omega0() * uniform(0.8, 1.2);
    const auto loop = equivalent_loop(a, w0, uniform(0.0, 1.0) * a.ts());
    const double t = 2 * std::numbers::pi / w0;
    try {
      const auto sol = hamel_period(loop, {0.5 * t, 1.5 * t}, t);
      if (!sol.valid) continue;
      ++valid;
      CHECK(std::abs(sol.switch_residual) <= kResidualTolerance * sol.state_scale);
      CHECK(sol.symmetry_residual <= kResidualTolerance * sol.state_scale);
      CHECK_FALSE(sol.interior_crossing);
      CHECK(sol.rising_slope);
      CHECK(sol.boundary_state.v > 0.0);
    } catch (const std::exception&) {
    }
  }
  CHECK(valid >= 40);
}

TEST_CASE("step bound invariants over random operating points") {
  for (int trial = 0; trial < 16; ++trial) {
    ArchParams a;
    a.arch = pick(0, 1) ? Architecture::Pdo : Architecture::Differentiator;
    a.m = pick(1, 3);
    a.big_m = std::vector{1, 2, 4, 8}[pick(0, 3)];
    a.q_factor = log_uniform(2.5, 1000.0);
    const auto b = step_bounds(a);
    CHECK(b.omega_low <= b.omega_high);
    CHECK(b.width >= 0.0);
    CHECK(b.width == b.omega_high - b.omega_low);

    auto s = a;
    const double lambda = log_uniform(1e-2, 1e2);
    s.f0 *= lambda;
    const auto bs = step_bounds(s);
    CHECK(std::abs(bs.relative_width / b.relative_width - 1.0) <= 1e-10);
  }
}
