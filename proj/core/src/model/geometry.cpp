#include "nvnmr/model/geometry.hpp"

#include <cmath>
#include <numbers>
#include <variant>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"

namespace nvnmr::model {

double angular_factor(double alpha_rad) {
  const double s = std::sin(alpha_rad);
  const double s2 = s * s;
  return std::numbers::pi * (8.0 - 3.0 * s2 * s2) / 288.0;
}

namespace {

double inverse_cube(double x) { return std::isinf(x) ? 0.0 : 1.0 / (x * x * x); }

}  // namespace

double geometric_factor_reduced(double alpha_rad, double depth_m, const SampleGeometry& geometry) {
  if (!std::isfinite(depth_m) || !(depth_m > 0.0)) {
    throw InvalidArgument(fmt::format("geometric factor needs a positive finite depth, got {} m", depth_m));
  }
  validate_geometry(geometry);
  const double a = angular_factor(alpha_rad);
  if (const auto* slab = std::get_if<Slab>(&geometry)) {
    return a * (inverse_cube(depth_m + slab->z1) - inverse_cube(depth_m + slab->z2));
  }
  return a * inverse_cube(depth_m);
}

double b_rms_squared(const NvCenter& nv, const NuclearSample& sample, const PhysicalConstants& k) {
  const double g = geometric_factor_reduced(nv.alpha(), nv.depth(), sample.geometry());
  return sample.rho() * k.dipolar_prefactor_sq(sample.gamma_n()) * 2.25 * g;
}

}  // namespace nvnmr::model
