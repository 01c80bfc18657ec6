#include "resonator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "error.hpp"

namespace relaylock {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be finite");
  }
}

}  // namespace

ResonatorParams::ResonatorParams(double f0, double omega0, double q, double gain)
    : f0_(f0), omega0_(omega0), q_(q), xi_(1.0 / (2.0 * q)), gain_(gain) {
  require_finite(f0, "f0");
  require_finite(q, "q_factor");
  require_finite(gain, "plant_gain");
  if (!(f0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "f0 must be > 0");
  if (!(q > 0.0)) throw Error(ErrorCode::InvalidArgument, "q_factor must be > 0");
  if (gain == 0.0) throw Error(ErrorCode::InvalidArgument, "plant_gain must be nonzero");
  if (!(xi_ > 0.0 && xi_ < 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "damping ratio 1/(2Q) must lie in (0, 1); got Q = " + std::to_string(q));
  }
}

ResonatorParams ResonatorParams::from_frequency(double f0, double q_factor, double plant_gain) {
  return ResonatorParams(f0, 2.0 * std::numbers::pi * f0, q_factor, plant_gain);
}

ResonatorParams ResonatorParams::from_pulsation(double omega0, double q_factor,
                                                double plant_gain) {
  require_finite(omega0, "omega0");
  return ResonatorParams(omega0 / (2.0 * std::numbers::pi), omega0, q_factor, plant_gain);
}

ResonatorParams ResonatorParams::with_gain(double plant_gain) const {
  return ResonatorParams(f0_, omega0_, q_, plant_gain);
}

ResonatorParams ResonatorParams::with_pulsation(double omega0) const {
  return from_pulsation(omega0, q_, gain_);
}

std::complex<double> freq_response(const ResonatorParams& p, double omega) {
  const double w0 = p.omega0();
  const std::complex<double> den(w0 * w0 - omega * omega, 2.0 * p.xi() * w0 * omega);
  return p.plant_gain() / den;
}

Eigen::Matrix2d transition_matrix(const ResonatorParams& p, double dt) {
  require_finite(dt, "dt");
  if (dt < 0.0) throw Error(ErrorCode::InvalidArgument, "dt must be >= 0");

  const double w0 = p.omega0();
  const double sigma = p.xi() * w0;
  const double wd = w0 * std::sqrt((1.0 - p.xi()) * (1.0 + p.xi()));
  const double e = std::exp(-sigma * dt);
  const double c = std::cos(wd * dt);
  const double s = std::sin(wd * dt);
  const double k = sigma / wd;

  Eigen::Matrix2d phi;
  phi << e * (c + k * s), e * s / wd,
         -e * w0 * w0 * s / wd, e * (c - k * s);
  return phi;
}

Transition::Transition(const ResonatorParams& params, double dt)
    : phi_(transition_matrix(params, dt)),
      static_gain_(params.plant_gain() / (params.omega0() * params.omega0())) {}

StateVector propagate_const_input(const ResonatorParams& params, StateVector state, double u,
                                  double dt) {
  require_finite(state.w, "state.w");
  require_finite(state.v, "state.v");
  require_finite(u, "input level");
  return Transition(params, dt).apply(state, u);
}

StateVector propagate_piecewise(const ResonatorParams& params, StateVector state,
                                std::span<const Segment> segments) {
  for (const Segment& seg : segments) {
    state = propagate_const_input(params, state, seg.level, seg.duration);
  }
  return state;
}

}  // namespace relaylock
