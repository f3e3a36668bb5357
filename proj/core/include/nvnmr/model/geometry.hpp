#pragma once

#include "nvnmr/core/constants.hpp"
#include "nvnmr/core/types.hpp"

namespace nvnmr::model {

/// Angular part of the reduced geometric factor, pi * (8 - 3 sin^4 alpha) / 288.
/// Gamma~ = angular_factor(alpha) / d^3 for a semi-infinite sample.
double angular_factor(double alpha_rad);

/// Reduced geometric factor Gamma~ (m^-3): the integral of
/// u_z^2 (1 - u_z^2) / r^6 over the sample volume seen from an NV at depth d.
///
/// SemiInfinite gives pi (8 - 3 sin^4 alpha) / (288 d^3). A slab [z1, z2]
/// gives the same angular factor times (d+z1)^-3 - (d+z2)^-3, so
/// Slab{0, inf} reproduces the semi-infinite value.
///
/// Throws InvalidArgument for a non-finite or non-positive depth and for an
/// invalid slab.
double geometric_factor_reduced(double alpha_rad, double depth_m, const SampleGeometry& geometry);

/// Variance of the Larmor-frequency field at the NV (T^2):
/// rho (mu0 hbar gamma_n / 4pi)^2 * (9/4) Gamma~. On a {100} surface with a
/// semi-infinite sample this is rho (...)^2 * 5 pi / (96 d^3).
double b_rms_squared(const NvCenter& nv, const NuclearSample& sample,
                     const PhysicalConstants& k = PhysicalConstants::standard());

}  // namespace nvnmr::model
