#pragma once

#include <numbers>

namespace nvnmr::model {

/// Detuning omega_L - pi/tau (rad/s).
inline double detuning(double tau, double omega_l) { return omega_l - std::numbers::pi / tau; }

/// Sequence functional K(N tau) (s^2) for an infinitely narrow nuclear line:
/// (N tau)^2 sinc^2[(N tau / 2)(omega_L - pi/tau)].
double k_infinite(long n_pulses, double tau, double omega_l);

/// Below this |delta| * T2n* the finite-linewidth functional switches to a
/// series in the detuning.
inline constexpr double kResonanceSeriesThreshold = 1e-4;

/// Sequence functional for a Lorentzian nuclear line of half-width 1/T2n*.
/// This is the exact convolution of the resonant filter harmonic with the
/// Lorentzian; it tends to k_infinite as T2n* grows.
double k_finite(long n_pulses, double tau, double omega_l, double t2n_star);

}  // namespace nvnmr::model
