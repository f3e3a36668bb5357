#pragma once

#include "nvnmr/core/types.hpp"

namespace nvnmr::model {

/// Field spectral density of a statistically polarized spin-1/2 bath,
/// S_B(omega) = pi B_RMS^2 [l(omega - omega_L) + l(omega + omega_L)], where l is
/// a unit-area Lorentzian of half-width 1/T2n* (a delta in the infinite limit).
class SpectralDensityParams {
 public:
  /// Throws InvalidArgument unless b_rms_sq >= 0 and omega_L > 0.
  SpectralDensityParams(double b_rms_sq, double omega_l, DephasingTime t2n);

  double b_rms_sq() const noexcept { return b_rms_sq_; }
  double omega_l() const noexcept { return omega_l_; }
  const DephasingTime& t2n_star() const noexcept { return t2n_; }

  /// Unit-area Lorentzian line centred on +omega_L (1/(rad/s)). Zero
  /// everywhere in the infinite-T2n* limit, where the line is a delta.
  double line(double omega) const noexcept;

  /// S_B(omega) in T^2 s, finite T2n* only (0 in the delta limit).
  double density(double omega) const noexcept;

 private:
  double b_rms_sq_;
  double omega_l_;
  DephasingTime t2n_;
};

}  // namespace nvnmr::model
