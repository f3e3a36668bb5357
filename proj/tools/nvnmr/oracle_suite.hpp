#pragma once

#include <cstddef>
#include <cstdint>

#include "nvnmr/core/constants.hpp"
#include "nvnmr/core/types.hpp"

namespace nvnmr::cli {

/// Per-spin dip the nearest possible nucleus is allowed to reach; the case
/// generator aims for half of it.
inline constexpr double kWeakCouplingDip = 1e-4;

/// One random pseudospin-versus-exponential comparison.
struct PseudospinCase {
  std::size_t index = 0;
  double depth = 0.0;  // m
  double alpha = 0.0;
  long n_pulses = 8;
  double omega_l = 0.0;  // rad/s
  double tau = 0.0;      // s
  double rho = 0.0;      // m^-3
  double r_max = 0.0;    // m
  std::uint64_t seed = 0;
};

/// Draws depth in [3, 30] nm, N in {8, 16, ..., 128} and tau within the
/// central lobe of the dip. omega_L is set so the strongest possible single
/// coupling (a spin at distance d) dips by kWeakCouplingDip / 2, and rho so
/// the region r <= 10 d holds `target_spins` on average.
PseudospinCase make_pseudospin_case(std::uint64_t seed, std::size_t index, double alpha, double gamma_n,
                                    const SampleGeometry& geometry, double target_spins,
                                    const PhysicalConstants& k = PhysicalConstants::standard());

struct PseudospinCaseResult {
  PseudospinCase input;
  std::size_t spins = 0;
  double product = 1.0;      // prod_j S^j
  double exponential = 1.0;  // exp form with the realization's B_RMS^2
  double relative_difference = 0.0;
  double log_relative_difference = 0.0;
  double max_dip = 0.0;
  bool weak_coupling = true;
};

PseudospinCaseResult run_pseudospin_case(const PseudospinCase& c, double gamma_n, const SampleGeometry& geometry,
                                         int jobs = 1, const PhysicalConstants& k = PhysicalConstants::standard());

}  // namespace nvnmr::cli
