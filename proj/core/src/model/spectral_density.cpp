#include "nvnmr/model/spectral_density.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"

namespace nvnmr::model {

SpectralDensityParams::SpectralDensityParams(double b_rms_sq, double omega_l, DephasingTime t2n)
    : b_rms_sq_(b_rms_sq), omega_l_(omega_l), t2n_(t2n) {
  if (!(b_rms_sq >= 0.0) || !std::isfinite(b_rms_sq)) {
    throw InvalidArgument(fmt::format("B_RMS^2 must be >= 0, got {}", b_rms_sq));
  }
  if (!(omega_l > 0.0) || !std::isfinite(omega_l)) {
    throw InvalidArgument(fmt::format("omega_L must be > 0, got {}", omega_l));
  }
}

double SpectralDensityParams::line(double omega) const noexcept {
  if (t2n_.is_infinite()) return 0.0;
  const double gamma = 1.0 / t2n_.seconds();
  const double d = omega - omega_l_;
  return gamma / (std::numbers::pi * (d * d + gamma * gamma));
}

double SpectralDensityParams::density(double omega) const noexcept {
  if (t2n_.is_infinite()) return 0.0;
  const double gamma = 1.0 / t2n_.seconds();
  const double dp = omega - omega_l_;
  const double dm = omega + omega_l_;
  const double lp = gamma / (std::numbers::pi * (dp * dp + gamma * gamma));
  const double lm = gamma / (std::numbers::pi * (dm * dm + gamma * gamma));
  return std::numbers::pi * b_rms_sq_ * (lp + lm);
}

}  // namespace nvnmr::model
