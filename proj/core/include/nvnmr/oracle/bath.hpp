#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "nvnmr/core/constants.hpp"
#include "nvnmr/core/types.hpp"

namespace nvnmr::oracle {

/// A frozen set of point nuclei. Positions are relative to the NV in the lab
/// frame: z is the outward surface normal, so a spin at height h above the
/// surface has z = depth + h.
struct SpinBathRealization {
  std::vector<Eigen::Vector3d> positions;  // m
  std::uint64_t seed = 0;
  double r_max = 0.0;  // m
  double depth = 0.0;  // m, NV depth the positions were drawn for
  NuclearSample sample{NuclearSample::Params{}};
};

/// Poisson point process of intensity rho over the sample region inside a
/// ball of radius r_max around the NV.
///
/// The region is cut into fixed radial shells (ratio 2^(1/8) starting at the
/// closest sample point) and azimuthal sectors; each chunk draws from its own
/// generator seeded by (seed, shell, sector). Shell and sector layout do not
/// depend on r_max, so the realization for a larger r_max contains the one for
/// a smaller r_max, and results do not depend on how chunks are scheduled.
class BathSampler {
 public:
  /// Throws TruncationError when the analytic tail bound beyond r_max exceeds
  /// 1% of the reduced geometric factor, and InvalidArgument when
  /// r_max < 10 * depth.
  BathSampler(const NuclearSample& sample, const NvCenter& nv, double r_max, std::uint64_t seed);

  std::size_t chunk_count() const noexcept { return chunks_.size(); }
  /// Appends the accepted positions of chunk `i` to `out`.
  void generate_chunk(std::size_t i, std::vector<Eigen::Vector3d>& out) const;

  double region_volume() const noexcept { return volume_; }
  double expected_count() const noexcept { return sample_.rho() * volume_; }
  double r_max() const noexcept { return r_max_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const NuclearSample& sample() const noexcept { return sample_; }
  const NvCenter& nv() const noexcept { return nv_; }

  /// Throws InvalidArgument if the expected count exceeds `max_points`.
  SpinBathRealization materialize(std::size_t max_points = 50'000'000) const;

 private:
  struct Chunk {
    std::uint32_t shell;
    std::uint32_t sector;
    std::uint32_t sectors;
    double r_lo;
    double r_hi;
  };

  NuclearSample sample_;
  NvCenter nv_;
  double r_max_;
  std::uint64_t seed_;
  double volume_;
  std::vector<Chunk> chunks_;
};

/// Volume (m^3) of the sample region within distance r_max of the NV.
double region_volume(const NvCenter& nv, const SampleGeometry& geometry, double r_max);

/// Upper bound on the part of Gamma~ (m^-3) contributed by sample beyond r_max,
/// from u_z^2 (1 - u_z^2) <= 1/4.
double truncation_tail_bound(const NvCenter& nv, const SampleGeometry& geometry, double r_max);

SpinBathRealization sample_bath(const NuclearSample& sample, const NvCenter& nv, double r_max,
                                std::uint64_t seed);

struct GeometricSum {
  std::size_t count = 0;
  double sum = 0.0;             // sum_j u_z^2 (1 - u_z^2) / r_j^6, m^-6
  double gamma_tilde = 0.0;     // sum / rho, m^-3
  double gamma_tilde_se = 0.0;  // Poisson standard error of gamma_tilde
  double gamma = 0.0;           // (mu0 hbar gamma_n / 4pi)^2 * sum, T^2
  double b_rms_sq = 0.0;        // (9/4) gamma, T^2
  double b_rms_sq_se = 0.0;

  /// Builds the derived fields from the raw term sum and sum of squares.
  static GeometricSum from_sums(std::size_t count, double sum, double sum_sq,
                                const NuclearSample& sample, const PhysicalConstants& k);
};

/// Dipolar geometric sum over a materialized bath. Throws InvalidArgument when
/// `nv` has a different depth than the bath was drawn for.
GeometricSum geometric_sum(const SpinBathRealization& bath, const NvCenter& nv,
                           const PhysicalConstants& k = PhysicalConstants::standard());

/// Streaming variant: draws and sums chunk by chunk without storing the bath.
/// `jobs` threads share the chunks; the result is bitwise independent of `jobs`.
GeometricSum geometric_sum(const BathSampler& sampler,
                           const PhysicalConstants& k = PhysicalConstants::standard(), int jobs = 1);

/// u_z^2 (1 - u_z^2) / r^6 for one spin at `r` relative to the NV.
double geometric_term(const Eigen::Vector3d& r, const Eigen::Vector3d& nv_axis);

/// Unit vector of the NV axis in the lab frame (azimuth fixed at 0).
Eigen::Vector3d nv_axis(double alpha_rad);

/// Writes x_nm,y_nm,z_nm,kappa_sq_rad2_per_s2 rows with a metadata header.
void write_realization_csv(std::ostream& os, const SpinBathRealization& bath, const NvCenter& nv,
                           const PhysicalConstants& k = PhysicalConstants::standard());

}  // namespace nvnmr::oracle
