#pragma once

#include <span>
#include <vector>

#include "nvnmr/core/constants.hpp"
#include "nvnmr/core/types.hpp"

namespace nvnmr::model {

/// Everything the forward model needs to evaluate C(tau).
struct ContrastModelParams {
  NvCenter nv;
  NuclearSample sample;
  PulseFamily family = PulseFamily::XY8;
  long n_pulses = 8;
  double omega_l = 0.0;  // rad/s
  const PhysicalConstants* constants = &PhysicalConstants::standard();
};

struct ContrastOptions {
  /// Add the k = -1 harmonic and its cross term with k = 0 (off by default;
  /// they barely change the lineshape near the fundamental dip).
  bool include_off_resonant = false;
};

/// Normalized NV contrast exp[-(2/pi^2) gamma_e^2 B_RMS^2 K(N tau)], with K
/// picked by the sample's T2n* (infinite or finite). Result lies in (0, 1].
double contrast(const ContrastModelParams& p, double tau, const ContrastOptions& opts = {});

/// Same as `contrast` for a precomputed B_RMS^2, so a fit can hold the
/// geometry fixed while sweeping tau.
double contrast_from_brms(double b_rms_sq, long n_pulses, double omega_l, const DephasingTime& t2n,
                          double tau, const PhysicalConstants& k, const ContrastOptions& opts = {});

std::vector<double> contrast_curve(const ContrastModelParams& p, std::span<const double> taus,
                                   const ContrastOptions& opts = {});

/// Free-precession time of the fundamental dip, pi / omega_L. Throws
/// InvalidArgument unless omega_L > 0.
double dip_position(double omega_l);

}  // namespace nvnmr::model
