#pragma once

#include <optional>
#include <string_view>

#include "nvnmr/core/constants.hpp"

namespace nvnmr::linewidth {

/// Inputs for a Stokes-Einstein diffusion estimate. D is resolved either from
/// `diffusion_coefficient` directly or from eta (given, or rho_m * nu), the
/// hydrodynamic radius and the temperature.
struct DiffusionSample {
  std::optional<double> kinematic_viscosity;    // m^2/s
  std::optional<double> mass_density;           // kg/m^3
  std::optional<double> dynamic_viscosity;      // Pa s
  std::optional<double> hydrodynamic_radius;    // m
  double temperature = 293.0;                   // K
  std::optional<double> diffusion_coefficient;  // m^2/s, overrides Stokes-Einstein

  /// Polybutadiene-based immersion oil: 450 cSt, 900 kg/m^3, r = 1 nm.
  static DiffusionSample immersion_oil();
};

/// eta, either given or rho_m * nu. Throws InvalidArgument naming the
/// missing field.
double dynamic_viscosity(const DiffusionSample& s);

/// kB T / (6 pi eta r), or the override. Throws InvalidArgument when a needed
/// input is missing or non-positive, or when both an override and
/// Stokes-Einstein inputs are given.
double diffusion_coefficient(const DiffusionSample& s,
                             const PhysicalConstants& k = PhysicalConstants::standard());

/// Translational correlation time 2 d^2 / D (s).
double correlation_time(double depth_m, double diffusion_m2_per_s);

enum class Convention {
  PaperNumeric,    // 2 / tau_d, read directly as Hz
  AngularOver2Pi,  // (2 / tau_d) / 2 pi, the angular Lorentzian width in Hz
};

std::string_view to_string(Convention c) noexcept;
/// "paper" or "angular"; throws InvalidArgument otherwise.
Convention parse_convention(std::string_view s);

/// Full width at half maximum of the diffusion-broadened line (Hz).
double linewidth_fwhm(double tau_d, Convention convention = Convention::PaperNumeric);

/// Inverse of linewidth_fwhm: the tau_d that gives `fwhm_hz`.
double correlation_time_from_fwhm(double fwhm_hz, Convention convention = Convention::PaperNumeric);

/// Dephasing time of the Lorentzian matching a correlation time; the two
/// line shapes coincide, so this is the identity.
double t2n_star_equivalent(double tau_d);

}  // namespace nvnmr::linewidth
