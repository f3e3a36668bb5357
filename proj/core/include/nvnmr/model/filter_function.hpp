#pragma once

#include <vector>

namespace nvnmr::model {

/// |g(omega, tau, N)|^2 (s^2) from the harmonic expansion of the sequence
/// modulation, keeping k in [-k_max - 1, k_max]. k_max = 0 retains the
/// resonant pair k = 0, -1.
double filter_function_sq(double omega, double tau, long n_pulses, int k_max = 0);

/// All-harmonic closed form
///   |g|^2 = (16 / omega^2) sin^4(omega tau / 4) sin^2(N omega tau / 2) / cos^2(omega tau / 2),
/// evaluated through its removable singularities (omega = 0, and the
/// resonances omega tau = (2m+1) pi for even N).
double filter_function_sq_all_harmonics(double omega, double tau, long n_pulses);

/// One constant-sign interval of the modulation g(t).
struct ModulationSegment {
  double start;     // s
  double duration;  // s
  int sign;         // +1 or -1
};

/// Piecewise-constant g(t) of an N-pulse sequence: N + 1 intervals
/// tau/2, tau, ..., tau, tau/2 with alternating sign, starting at t = 0.
std::vector<ModulationSegment> modulation_segments(double tau, long n_pulses);

}  // namespace nvnmr::model
