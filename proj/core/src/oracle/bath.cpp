#include "nvnmr/oracle/bath.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/core/units.hpp"
#include "nvnmr/detail/numeric.hpp"
#include "nvnmr/detail/parallel.hpp"
#include "nvnmr/model/geometry.hpp"
#include "nvnmr/oracle/pseudospin.hpp"

namespace nvnmr::oracle {

namespace {

using std::numbers::pi;

constexpr double kShellRatioLog2 = 1.0 / 8.0;
constexpr double kSectorTarget = 262144.0;  // expected proposals per chunk
constexpr double kMaxTailFraction = 0.01;

struct Heights {
  double lo;  // distance from the NV plane to the bottom of the sample
  double hi;  // top of the sample, +inf when semi-infinite
};

Heights heights(const NvCenter& nv, const SampleGeometry& g) {
  if (const auto* slab = std::get_if<Slab>(&g)) {
    return {nv.depth() + slab->z1, nv.depth() + slab->z2};
  }
  return {nv.depth(), std::numeric_limits<double>::infinity()};
}

// Volume of the cap {z >= a} of a ball of radius r.
double cap_volume(double r, double a) {
  if (!(a < r)) return 0.0;
  const double h = r - a;
  return pi * h * h * (2.0 * r + a) / 3.0;
}

std::uint64_t chunk_key(std::uint64_t seed, std::uint32_t shell, std::uint32_t sector) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), shell,
                    sector};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

struct ChunkSums {
  std::size_t count = 0;
  detail::CompensatedSum sum;
  detail::CompensatedSum sum_sq;
};

}  // namespace

GeometricSum GeometricSum::from_sums(std::size_t count, double sum, double sum_sq,
                                     const NuclearSample& sample, const PhysicalConstants& k) {
  GeometricSum out;
  out.count = count;
  out.sum = sum;
  const double rho = sample.rho();
  if (rho > 0.0) {
    out.gamma_tilde = sum / rho;
    out.gamma_tilde_se = std::sqrt(sum_sq) / rho;
  }
  const double pref = k.dipolar_prefactor_sq(sample.gamma_n());
  out.gamma = pref * sum;
  out.b_rms_sq = 2.25 * out.gamma;
  out.b_rms_sq_se = 2.25 * pref * std::sqrt(sum_sq);
  return out;
}

double region_volume(const NvCenter& nv, const SampleGeometry& geometry, double r_max) {
  const Heights h = heights(nv, geometry);
  return cap_volume(r_max, h.lo) - cap_volume(r_max, h.hi);
}

double truncation_tail_bound(const NvCenter& nv, const SampleGeometry& geometry, double r_max) {
  const Heights h = heights(nv, geometry);
  if (!(r_max > 0.0)) return std::numeric_limits<double>::infinity();
  // Hemisphere beyond r_max: int_R^inf (1/4) r^-6 2 pi r^2 dr.
  const double r3 = r_max * r_max * r_max;
  double bound = pi / (6.0 * r3);
  // A slab entirely inside the ball meets each sphere of radius r in a zone of
  // area 2 pi r (z2 - z1).
  if (std::isfinite(h.hi) && r_max >= h.hi) {
    bound = std::min(bound, pi * (h.hi - h.lo) / (8.0 * r3 * r_max));
  }
  return bound;
}

BathSampler::BathSampler(const NuclearSample& sample, const NvCenter& nv, double r_max,
                         std::uint64_t seed)
    : sample_(sample), nv_(nv), r_max_(r_max), seed_(seed), volume_(0.0) {
  if (!std::isfinite(r_max) || r_max < 10.0 * nv.depth()) {
    throw InvalidArgument(fmt::format("r_max must be at least 10 x depth ({} nm), got {} nm",
                                      units::m_to_nm(10.0 * nv.depth()), units::m_to_nm(r_max)));
  }
  const double gt = model::geometric_factor_reduced(nv.alpha(), nv.depth(), sample.geometry());
  const double tail = truncation_tail_bound(nv, sample.geometry(), r_max);
  if (tail > kMaxTailFraction * gt) {
    throw TruncationError(fmt::format(
        "truncation at r_max = {} nm may drop up to {:.3g}% of the geometric sum (limit 1%)",
        units::m_to_nm(r_max), 100.0 * tail / gt));
  }
  volume_ = oracle::region_volume(nv, sample.geometry(), r_max);

  const Heights h = heights(nv, sample.geometry());
  const double r_in = h.lo;
  for (std::uint32_t shell = 0;; ++shell) {
    const double r_lo = r_in * std::exp2(kShellRatioLog2 * shell);
    if (r_lo >= r_max) break;
    const double r_hi = r_in * std::exp2(kShellRatioLog2 * (shell + 1));
    const double mu = sample.rho() * (2.0 * pi / 3.0) * (r_hi * r_hi * r_hi - r_lo * r_lo * r_lo);
    const auto sectors = static_cast<std::uint32_t>(std::max(1.0, std::ceil(mu / kSectorTarget)));
    for (std::uint32_t s = 0; s < sectors; ++s) chunks_.push_back({shell, s, sectors, r_lo, r_hi});
  }
}

void BathSampler::generate_chunk(std::size_t i, std::vector<Eigen::Vector3d>& out) const {
  const Chunk& c = chunks_.at(i);
  const Heights h = heights(nv_, sample_.geometry());
  std::mt19937_64 rng(chunk_key(seed_, c.shell, c.sector));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double lo3 = c.r_lo * c.r_lo * c.r_lo;
  const double span3 = c.r_hi * c.r_hi * c.r_hi - lo3;
  const double mean = sample_.rho() * (2.0 * pi / 3.0) * span3 / c.sectors;
  if (!(mean > 0.0)) return;
  std::poisson_distribution<long long> count_dist(mean);
  const long long n = count_dist(rng);
  const double sector_width = 2.0 * pi / c.sectors;

  for (long long j = 0; j < n; ++j) {
    // Draw all three coordinates before testing so the stream stays aligned
    // regardless of r_max.
    const double r = std::cbrt(lo3 + unit(rng) * span3);
    const double ct = unit(rng);
    const double phi = sector_width * (c.sector + unit(rng));
    if (r > r_max_) continue;
    const double z = r * ct;
    if (z < h.lo || z > h.hi) continue;
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    out.emplace_back(r * st * std::cos(phi), r * st * std::sin(phi), z);
  }
}

SpinBathRealization BathSampler::materialize(std::size_t max_points) const {
  const double expected = expected_count();
  if (expected > static_cast<double>(max_points)) {
    throw InvalidArgument(fmt::format(
        "bath would hold ~{:.3g} spins, above the materialization cap of {}; use the streaming sum",
        expected, max_points));
  }
  SpinBathRealization bath;
  bath.seed = seed_;
  bath.r_max = r_max_;
  bath.depth = nv_.depth();
  bath.sample = sample_;
  bath.positions.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));
  for (std::size_t i = 0; i < chunks_.size(); ++i) generate_chunk(i, bath.positions);
  return bath;
}

SpinBathRealization sample_bath(const NuclearSample& sample, const NvCenter& nv, double r_max,
                                std::uint64_t seed) {
  return BathSampler(sample, nv, r_max, seed).materialize();
}

Eigen::Vector3d nv_axis(double alpha_rad) {
  return {std::sin(alpha_rad), 0.0, std::cos(alpha_rad)};
}

double geometric_term(const Eigen::Vector3d& r, const Eigen::Vector3d& axis) {
  const double r2 = r.squaredNorm();
  const double proj = r.dot(axis);
  const double uz2 = proj * proj / r2;
  return uz2 * (1.0 - uz2) / (r2 * r2 * r2);
}

GeometricSum geometric_sum(const SpinBathRealization& bath, const NvCenter& nv,
                           const PhysicalConstants& k) {
  if (std::abs(nv.depth() - bath.depth) > 1e-12 * bath.depth) {
    throw InvalidArgument(fmt::format("bath was drawn for depth {} nm, NV is at {} nm",
                                      units::m_to_nm(bath.depth), units::m_to_nm(nv.depth())));
  }
  const Eigen::Vector3d axis = nv_axis(nv.alpha());
  detail::CompensatedSum sum;
  detail::CompensatedSum sum_sq;
  for (const auto& p : bath.positions) {
    const double t = geometric_term(p, axis);
    sum.add(t);
    sum_sq.add(t * t);
  }
  return GeometricSum::from_sums(bath.positions.size(), sum.value(), sum_sq.value(), bath.sample, k);
}

GeometricSum geometric_sum(const BathSampler& sampler, const PhysicalConstants& k, int jobs) {
  const Eigen::Vector3d axis = nv_axis(sampler.nv().alpha());
  std::vector<ChunkSums> parts(sampler.chunk_count());
  detail::parallel_for(parts.size(), jobs, [&](std::size_t i) {
    thread_local std::vector<Eigen::Vector3d> buffer;
    buffer.clear();
    sampler.generate_chunk(i, buffer);
    ChunkSums& part = parts[i];
    part.count = buffer.size();
    for (const auto& p : buffer) {
      const double t = geometric_term(p, axis);
      part.sum.add(t);
      part.sum_sq.add(t * t);
    }
  });
  std::size_t count = 0;
  detail::CompensatedSum sum;
  detail::CompensatedSum sum_sq;
  for (const auto& part : parts) {
    count += part.count;
    sum.add(part.sum);
    sum_sq.add(part.sum_sq);
  }
  return GeometricSum::from_sums(count, sum.value(), sum_sq.value(), sampler.sample(), k);
}

void write_realization_csv(std::ostream& os, const SpinBathRealization& bath, const NvCenter& nv,
                           const PhysicalConstants& k) {
  fmt::print(os, "# nvnmr_csv_version=1.0\n# kind=bath\n");
  fmt::print(os, "# seed={}\n# r_max_nm={:.17g}\n# depth_nm={:.17g}\n# alpha_deg={:.17g}\n", bath.seed,
             units::m_to_nm(bath.r_max), units::m_to_nm(bath.depth), units::rad_to_deg(nv.alpha()));
  fmt::print(os, "# rho_per_nm3={:.17g}\n# count={}\n", units::per_m3_to_per_nm3(bath.sample.rho()),
             bath.positions.size());
  fmt::print(os, "x_nm,y_nm,z_nm,kappa_sq_rad2_per_s2\n");
  for (const auto& p : bath.positions) {
    const PseudospinCoupling c = coupling_for(p, nv.alpha(), bath.sample.gamma_n(), k);
    fmt::print(os, "{:.17g},{:.17g},{:.17g},{:.17g}\n", units::m_to_nm(p.x()), units::m_to_nm(p.y()),
               units::m_to_nm(p.z()), c.kappa_sq());
  }
}

}  // namespace nvnmr::oracle
