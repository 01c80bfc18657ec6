#pragma once

#include <complex>
#include <span>

#include <Eigen/Core>

namespace relaylock {

// Displacement and velocity of the resonator.
struct StateVector {
  double w = 0.0;
  double v = 0.0;

  friend bool operator==(const StateVector&, const StateVector&) = default;
};

inline StateVector operator+(StateVector a, StateVector b) { return {a.w + b.w, a.v + b.v}; }
inline StateVector operator-(StateVector a, StateVector b) { return {a.w - b.w, a.v - b.v}; }
inline StateVector operator*(double s, StateVector a) { return {s * a.w, s * a.v}; }

/// Second-order resonator  F(s) = gain / (omega0^2 + 2 xi omega0 s + s^2).
///
/// The damping ratio is tied to the quality factor by xi = 1 / (2 Q); only
/// underdamped plants (0 < xi < 1) are representable.
class ResonatorParams {
 public:
  static ResonatorParams from_frequency(double f0, double q_factor, double plant_gain = 1.0);
  static ResonatorParams from_pulsation(double omega0, double q_factor, double plant_gain = 1.0);

  double f0() const { return f0_; }
  double omega0() const { return omega0_; }
  double q_factor() const { return q_; }
  double xi() const { return xi_; }
  double plant_gain() const { return gain_; }

  ResonatorParams with_gain(double plant_gain) const;
  ResonatorParams with_pulsation(double omega0) const;

 private:
  ResonatorParams(double f0, double omega0, double q, double gain);

  double f0_;
  double omega0_;
  double q_;
  double xi_;
  double gain_;
};

std::complex<double> freq_response(const ResonatorParams& params, double omega);

/// Homogeneous state-transition matrix over an interval of length dt.
Eigen::Matrix2d transition_matrix(const ResonatorParams& params, double dt);

// Exact propagation over a fixed interval, reused by the loop simulator so the
// matrix exponential is evaluated once per configuration.
class Transition {
 public:
  Transition(const ResonatorParams& params, double dt);

  StateVector apply(StateVector x, double u) const {
    const double eq = static_gain_ * u;
    const double dw = x.w - eq;
    return {phi_(0, 0) * dw + phi_(0, 1) * x.v + eq,
            phi_(1, 0) * dw + phi_(1, 1) * x.v};
  }

  const Eigen::Matrix2d& matrix() const { return phi_; }

 private:
  Eigen::Matrix2d phi_;
  double static_gain_;
};

/// Exact state after dt under constant forcing u (closed form, no integrator).
StateVector propagate_const_input(const ResonatorParams& params, StateVector state, double u,
                                  double dt);

struct Segment {
  double duration = 0.0;
  double level = 0.0;
};

StateVector propagate_piecewise(const ResonatorParams& params, StateVector state,
                                std::span<const Segment> segments);

}  // namespace relaylock
