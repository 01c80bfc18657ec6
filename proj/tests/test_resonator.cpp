#include <doctest.h>

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "oracles.hpp"
#include "resonator.hpp"

using namespace relaylock;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kF0 = 35.8e3;
constexpr double kTs = 1.0 / (12.0 * kF0);

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double state_rel(StateVector a, StateVector b, double omega0) {
  const double scale = std::hypot(b.w, b.v / omega0);
  return std::hypot(a.w - b.w, (a.v - b.v) / omega0) / scale;
}
}  // namespace

TEST_CASE("construction validates parameters") {
  CHECK_THROWS_AS(ResonatorParams::from_frequency(0.0, 250), Error);
  CHECK_THROWS_AS(ResonatorParams::from_frequency(kF0, -1), Error);
  CHECK_THROWS_AS(ResonatorParams::from_frequency(kF0, 0.5), Error);  // critically damped
  CHECK_THROWS_AS(ResonatorParams::from_frequency(kF0, 250, 0.0), Error);
  const auto p = ResonatorParams::from_frequency(kF0, 250);
  CHECK(p.xi() == doctest::Approx(0.002));
  CHECK(p.omega0() == doctest::Approx(2 * kPi * kF0));
}

TEST_CASE("frequency response at resonance and DC") {
  const auto p = ResonatorParams::from_pulsation(1.0, 250);
  const auto h = freq_response(p, 1.0);
  CHECK(std::abs(h) == doctest::Approx(250.0).epsilon(1e-12));
  CHECK(std::arg(h) == doctest::Approx(-kPi / 2).epsilon(1e-12));

  const auto q = ResonatorParams::from_pulsation(3.0, 7.0, 2.5);
  const auto h0 = freq_response(q, 0.0);
  CHECK(h0.real() == doctest::Approx(2.5 / 9.0));
  CHECK(h0.imag() == 0.0);

  const auto s = ResonatorParams::from_frequency(kF0, 250);
  const double w = 2 * kPi * 12 * kF0;
  const auto direct = oracle::plant(s.omega0(), s.xi(), 1.0, w);
  CHECK(std::abs(freq_response(s, w) - direct) <= 1e-12 * std::abs(direct));
}

TEST_CASE("propagation fixed point and undamped period") {
  const auto p = ResonatorParams::from_frequency(kF0, 250, 3.0);
  const double u = 0.7;
  const StateVector eq{3.0 * u / (p.omega0() * p.omega0()), 0.0};
  for (double dt : {1e-9, kTs, 1e-3}) {
    const auto x = propagate_const_input(p, eq, u, dt);
    CHECK(rel(x.w, eq.w) <= 1e-14);
    CHECK(std::abs(x.v) <= 1e-14 * eq.w * p.omega0());
  }

  const auto un = ResonatorParams::from_pulsation(5.0, 1e12);
  const auto x = propagate_const_input(un, {1.0, 0.0}, 0.0, 2 * kPi / 5.0);
  CHECK(std::abs(x.w - 1.0) <= 1e-9);
  CHECK(std::abs(x.v / 5.0) <= 1e-9);
}

TEST_CASE("closed form agrees with fine-step RK4") {
  const auto p = ResonatorParams::from_frequency(kF0, 250);
  const auto exact = propagate_const_input(p, {0.0, 0.0}, 1.0, kTs);
  const auto ref = oracle::rk4(p.omega0(), p.xi(), 1.0, {0.0, 0.0}, 1.0, kTs, 10000);
  CHECK(state_rel(exact, ref, p.omega0()) <= 1e-9);

  const auto lowq = ResonatorParams::from_pulsation(2.0, 2.5, 0.3);
  const StateVector x0{0.4, -1.1};
  const auto e2 = propagate_const_input(lowq, x0, -0.8, 3.7);
  const auto r2 = oracle::rk4(2.0, lowq.xi(), 0.3, x0, -0.8, 3.7, 20000);
  CHECK(state_rel(e2, r2, 2.0) <= 1e-9);
}

TEST_CASE("piecewise propagation") {
  const auto p = ResonatorParams::from_frequency(kF0, 250);
  const StateVector x0{1e-3, 50.0};
  const Segment one[] = {{kTs, 0.0}};
  CHECK(propagate_piecewise(p, x0, one) == propagate_const_input(p, x0, 0.0, kTs));

  const Segment split[] = {{0.3 * kTs, 1.0}, {1.9 * kTs, 1.0}};
  const Segment whole[] = {{2.2 * kTs, 1.0}};
  CHECK(state_rel(propagate_piecewise(p, x0, split), propagate_piecewise(p, x0, whole),
                  p.omega0()) <= 1e-12);
  CHECK(propagate_piecewise(p, x0, {}) == x0);
}

TEST_CASE("transition matrix semigroup") {
  const auto p = ResonatorParams::from_frequency(kF0, 250);
  for (double a : {0.1 * kTs, kTs, 7.3 * kTs}) {
    for (double b : {0.05 * kTs, 2 * kTs, 11.0 * kTs}) {
      const Eigen::Matrix2d lhs = transition_matrix(p, a) * transition_matrix(p, b);
      const Eigen::Matrix2d rhs = transition_matrix(p, a + b);
      // Compare in the (w, v / omega0) metric so both rows carry the same units.
      Eigen::Matrix2d s = Eigen::Matrix2d::Identity();
      s(1, 1) = 1.0 / p.omega0();
      Eigen::Matrix2d si = Eigen::Matrix2d::Identity();
      si(1, 1) = p.omega0();
      CHECK((s * (lhs - rhs) * si).norm() <= 1e-12 * (s * rhs * si).norm());
    }
  }
  CHECK((transition_matrix(p, 0.0) - Eigen::Matrix2d::Identity()).norm() == 0.0);
}

TEST_CASE("energy decays when damped and is conserved without damping") {
  auto energy = [](const ResonatorParams& p, StateVector x) {
    return 0.5 * x.v * x.v + 0.5 * p.omega0() * p.omega0() * x.w * x.w;
  };
  const auto p = ResonatorParams::from_frequency(kF0, 250);
  StateVector x{1.0, 0.0};
  double e = energy(p, x);
  for (int i = 0; i < 200; ++i) {
    x = propagate_const_input(p, x, 0.0, 0.37 * kTs);
    const double next = energy(p, x);
    CHECK(next <= e);
    e = next;
  }

  const auto un = ResonatorParams::from_frequency(kF0, 1e15);
  const double period = 1.0 / kF0;
  StateVector y{1.0, 0.0};
  const double e0 = energy(un, y);
  for (int i = 0; i < 50; ++i) {
    y = propagate_const_input(un, y, 0.0, period);
    CHECK(std::abs(energy(un, y) - e0) <= 1e-10 * e0);
  }
}

TEST_CASE("propagation is linear in state and input") {
  const auto p = ResonatorParams::from_frequency(kF0, 40.0, 2.0);
  const StateVector a{0.3, -20.0}, b{-0.1, 90.0};
  const auto lhs = propagate_const_input(p, 2.0 * a + (-3.0) * b, 2.0 * 0.5 - 3.0 * 1.5, kTs);
  const auto rhs = 2.0 * propagate_const_input(p, a, 0.5, kTs) +
                   (-3.0) * propagate_const_input(p, b, 1.5, kTs);
  CHECK(state_rel(lhs, rhs, p.omega0()) <= 1e-13);
}
