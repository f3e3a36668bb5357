#include "nvnmr/linewidth/linewidth.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/core/units.hpp"

namespace nvnmr::linewidth {

namespace {

double require_positive(const std::optional<double>& v, std::string_view field) {
  if (!v) throw InvalidArgument(fmt::format("cannot resolve diffusion coefficient: {} is missing", field));
  if (!(*v > 0.0) || !std::isfinite(*v)) {
    throw InvalidArgument(fmt::format("{} must be positive and finite, got {}", field, *v));
  }
  return *v;
}

void require_positive(double v, std::string_view field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(fmt::format("{} must be positive and finite, got {}", field, v));
  }
}

}  // namespace

DiffusionSample DiffusionSample::immersion_oil() {
  DiffusionSample s;
  s.kinematic_viscosity = units::cst_to_m2_per_s(450.0);
  s.mass_density = 900.0;
  s.hydrodynamic_radius = units::nm_to_m(1.0);
  return s;
}

double dynamic_viscosity(const DiffusionSample& s) {
  if (s.dynamic_viscosity) return require_positive(s.dynamic_viscosity, "dynamic_viscosity");
  if (!s.kinematic_viscosity && !s.mass_density) {
    throw InvalidArgument(
        "cannot resolve diffusion coefficient: dynamic_viscosity is missing and "
        "kinematic_viscosity, mass_density are missing");
  }
  return require_positive(s.kinematic_viscosity, "kinematic_viscosity") *
         require_positive(s.mass_density, "mass_density");
}

double diffusion_coefficient(const DiffusionSample& s, const PhysicalConstants& k) {
  if (s.diffusion_coefficient) {
    if (s.dynamic_viscosity || s.kinematic_viscosity || s.hydrodynamic_radius) {
      throw InvalidArgument(
          "diffusion_coefficient override given together with Stokes-Einstein inputs; give one");
    }
    return require_positive(s.diffusion_coefficient, "diffusion_coefficient");
  }
  const double eta = dynamic_viscosity(s);
  const double r = require_positive(s.hydrodynamic_radius, "hydrodynamic_radius");
  require_positive(s.temperature, "temperature");
  return k.kB() * s.temperature / (6.0 * std::numbers::pi * eta * r);
}

double correlation_time(double depth_m, double diffusion_m2_per_s) {
  require_positive(depth_m, "depth");
  require_positive(diffusion_m2_per_s, "diffusion coefficient");
  return 2.0 * depth_m * depth_m / diffusion_m2_per_s;
}

std::string_view to_string(Convention c) noexcept {
  return c == Convention::PaperNumeric ? "paper" : "angular";
}

Convention parse_convention(std::string_view s) {
  if (s == "paper") return Convention::PaperNumeric;
  if (s == "angular") return Convention::AngularOver2Pi;
  throw InvalidArgument(fmt::format("unknown linewidth convention '{}' (expected paper or angular)", s));
}

double linewidth_fwhm(double tau_d, Convention convention) {
  require_positive(tau_d, "tau_d");
  const double w = 2.0 / tau_d;
  return convention == Convention::PaperNumeric ? w : w / (2.0 * std::numbers::pi);
}

double correlation_time_from_fwhm(double fwhm_hz, Convention convention) {
  require_positive(fwhm_hz, "linewidth");
  const double w = convention == Convention::PaperNumeric ? fwhm_hz : fwhm_hz * (2.0 * std::numbers::pi);
  return 2.0 / w;
}

double t2n_star_equivalent(double tau_d) {
  require_positive(tau_d, "tau_d");
  return tau_d;
}

}  // namespace nvnmr::linewidth
