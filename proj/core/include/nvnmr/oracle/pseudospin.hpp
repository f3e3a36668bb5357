#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nvnmr/core/constants.hpp"
#include "nvnmr/core/types.hpp"
#include "nvnmr/oracle/bath.hpp"

namespace nvnmr::oracle {

/// Hyperfine coupling of one nuclear spin to the NV in the NV frame (z along
/// the NV axis), rad/s. Only the A_z* row matters under the secular
/// approximation for the electron.
struct PseudospinCoupling {
  double a_zx = 0.0;
  double a_zy = 0.0;
  double a_zz = 0.0;

  double kappa_sq() const noexcept { return a_zx * a_zx + a_zy * a_zy; }
};

/// Point-dipole coupling for a nucleus at `r` (lab frame, relative to the NV).
PseudospinCoupling coupling_for(const Eigen::Vector3d& r, double alpha_rad, double gamma_n,
                                const PhysicalConstants& k = PhysicalConstants::standard());

std::vector<PseudospinCoupling> couplings(const SpinBathRealization& bath, const NvCenter& nv,
                                          const PhysicalConstants& k = PhysicalConstants::standard());

/// Exact dip 1 - S of one spin-1/2 nucleus after N pi pulses spaced tau
/// (symmetric tau/2 ... tau/2 timing, electron in ms = 0 / ms = 1).
double single_spin_dip(const PseudospinCoupling& c, double omega_l, long n_pulses, double tau);

/// Second-order dip 2 kappa^2/omega_L^2 sin^4(omega_L tau/4)
/// [sin(N omega_L tau/2)/cos(omega_L tau/2)]^2. Returns a negative value when
/// cos(omega_L tau/2) is too close to zero for the expansion to be used.
double single_spin_dip_second_order(const PseudospinCoupling& c, double omega_l, long n_pulses,
                                    double tau);

enum class PseudospinBranch { Exact, SecondOrder };

struct PseudospinSignal {
  double value = 1.0;        // prod_j S^j
  double log_value = 0.0;    // sum_j log |S^j|
  double max_dip = 0.0;      // max_j (1 - S^j)
  std::size_t fallbacks = 0; // spins evaluated exactly in the second-order branch
};

PseudospinSignal pseudospin_signal(std::span<const PseudospinCoupling> spins, double omega_l,
                                   long n_pulses, double tau, PseudospinBranch branch = PseudospinBranch::Exact);

/// Pseudospin product over a bath drawn chunk by chunk, together with the
/// geometric sum of the same realization. Deterministic for any `jobs`.
struct StreamedPseudospin {
  PseudospinSignal signal;
  GeometricSum geometry;
};

StreamedPseudospin pseudospin_signal(const BathSampler& sampler, double omega_l, long n_pulses,
                                     double tau, PseudospinBranch branch = PseudospinBranch::Exact,
                                     const PhysicalConstants& k = PhysicalConstants::standard(),
                                     int jobs = 1);

/// sum_j kappa_j^2 equals 4 gamma_e^2 B_RMS^2 of the same realization
/// identically; against the continuum B_RMS^2 it agrees only on average.
struct KappaBridge {
  std::size_t count = 0;
  double sum_kappa_sq = 0.0;          // rad^2/s^2
  double four_ge2_brms_sq = 0.0;      // from the realization's geometric sum
  double four_ge2_brms_sq_continuum = 0.0;
  double relative_difference = 0.0;   // sum_kappa_sq vs realization value
  double continuum_difference = 0.0;  // sum_kappa_sq vs continuum value
};

KappaBridge kappa_brms_bridge(const SpinBathRealization& bath, const NvCenter& nv,
                              const PhysicalConstants& k = PhysicalConstants::standard());

}  // namespace nvnmr::oracle
