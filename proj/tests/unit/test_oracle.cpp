#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "frozen_values.hpp"
#include "nvnmr/core/constants.hpp"
#include "nvnmr/core/error.hpp"
#include "nvnmr/core/types.hpp"
#include "nvnmr/model/contrast.hpp"
#include "nvnmr/model/filter_function.hpp"
#include "nvnmr/model/geometry.hpp"
#include "nvnmr/oracle/bath.hpp"
#include "nvnmr/oracle/pseudospin.hpp"
#include "property.hpp"

using namespace nvnmr;
using namespace nvnmr::oracle;
using nvnmr::testing::for_all;
using nvnmr::testing::Gen;
using nvnmr::testing::rel_diff;

namespace {

constexpr double kPi = std::numbers::pi;

NuclearSample sample_with(double rho, SampleGeometry geometry = SemiInfinite{}) {
  NuclearSample::Params p;
  p.rho = rho;
  p.geometry = geometry;
  return NuclearSample(p);
}

double cap_volume(double r, double d) {
  const double h = r - d;
  return kPi * h * h * (3.0 * r - h) / 3.0;
}

std::set<std::tuple<double, double, double>> as_set(const SpinBathRealization& b) {
  std::set<std::tuple<double, double, double>> s;
  for (const auto& p : b.positions) s.emplace(p.x(), p.y(), p.z());
  return s;
}

}  // namespace

// ------------------------------------------------------------------- bath

TEST(BathSampler, ZeroDensityIsEmpty) {
  const auto nv = NvCenter::from_nm(10.0);
  const auto bath = sample_bath(sample_with(0.0), nv, 100e-9, 1);
  EXPECT_TRUE(bath.positions.empty());
  const auto gs = geometric_sum(bath, nv);
  EXPECT_EQ(gs.count, 0u);
  EXPECT_EQ(gs.sum, 0.0);
  EXPECT_EQ(gs.b_rms_sq, 0.0);
}

TEST(BathSampler, RegionVolumeIsSphericalCap) {
  const auto nv = NvCenter::from_nm(5.0);
  EXPECT_LE(rel_diff(region_volume(nv, SemiInfinite{}, 50e-9), cap_volume(50e-9, 5e-9)), 1e-12);
  EXPECT_LE(rel_diff(region_volume(nv, Slab{1e-9, 3e-9}, 50e-9), cap_volume(50e-9, 6e-9) - cap_volume(50e-9, 8e-9)),
            1e-12);
}

TEST(BathSampler, CountWithinFiveSigma) {
  const auto nv = NvCenter::from_nm(5.0);
  const BathSampler sampler(sample_with(1e27), nv, 50e-9, 7);
  const double mu = sampler.expected_count();
  const auto bath = sampler.materialize();
  EXPECT_LE(std::abs(static_cast<double>(bath.positions.size()) - mu), 5.0 * std::sqrt(mu));
  for (const auto& p : bath.positions) {
    EXPECT_LE(p.norm(), 50e-9);
    EXPECT_GE(p.z(), 5e-9);
  }
}

TEST(BathSampler, SlabPointsStayInSlab) {
  const auto nv = NvCenter::from_nm(4.0);
  const auto bath = sample_bath(sample_with(5e27, Slab{1e-9, 6e-9}), nv, 40e-9, 3);
  ASSERT_FALSE(bath.positions.empty());
  for (const auto& p : bath.positions) {
    EXPECT_GE(p.z(), 5e-9 - 1e-18);
    EXPECT_LE(p.z(), 10e-9 + 1e-18);
  }
}

TEST(BathSampler, DeterministicPerSeed) {
  const auto nv = NvCenter::from_nm(5.0);
  const auto a = sample_bath(sample_with(1e27), nv, 50e-9, 42);
  const auto b = sample_bath(sample_with(1e27), nv, 50e-9, 42);
  const auto c = sample_bath(sample_with(1e27), nv, 50e-9, 43);
  ASSERT_EQ(a.positions.size(), b.positions.size());
  for (std::size_t i = 0; i < a.positions.size(); ++i) EXPECT_EQ(a.positions[i], b.positions[i]);
  EXPECT_NE(as_set(a), as_set(c));
}

TEST(BathSampler, LargerRadiusContainsSmaller) {
  const auto nv = NvCenter::from_nm(3.0);
  const auto s = sample_with(2e27);
  const auto small = as_set(sample_bath(s, nv, 30e-9, 5));
  const auto large = as_set(sample_bath(s, nv, 60e-9, 5));
  EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  EXPECT_GT(large.size(), small.size());
}

TEST(BathSampler, TruncationDoublingProperty) {
  for_all(10, 61, [](Gen& g) {
    const auto nv = NvCenter(g.uniform(2e-9, 6e-9), kAlpha100);
    const auto s = sample_with(g.log_uniform(2e26, 2e27));
    const double r = 10.0 * nv.depth();
    const auto seed = static_cast<std::uint64_t>(g.integer(0, 1 << 30));
    const auto a = geometric_sum(BathSampler(s, nv, r, seed));
    const auto b = geometric_sum(BathSampler(s, nv, 2.0 * r, seed));
    EXPECT_GE(b.count, a.count);
    EXPECT_GE(b.gamma_tilde, a.gamma_tilde);
    // The shell between r and 2r holds, on average, less than the tail bound.
    const double gt = model::geometric_factor_reduced(nv.alpha(), nv.depth(), s.geometry());
    EXPECT_LE(b.gamma_tilde - a.gamma_tilde, 10.0 * truncation_tail_bound(nv, s.geometry(), r) + 1e-3 * gt);
  });
}

TEST(BathSampler, RejectsShortRadiusAndLargeTail) {
  const auto nv = NvCenter::from_nm(10.0);
  EXPECT_THROW(BathSampler(sample_with(1e27), nv, 99e-9, 1), InvalidArgument);
  EXPECT_THROW(BathSampler(sample_with(1e27, Slab{500e-9, 1e-6}), nv, 100e-9, 1), TruncationError);
  EXPECT_NO_THROW(BathSampler(sample_with(1e27), nv, 100e-9, 1));
}

TEST(BathSampler, MaterializeRefusesHugeBaths) {
  const BathSampler sampler(NuclearSample::immersion_oil(), NvCenter::from_nm(10.0), 100e-9, 1);
  EXPECT_THROW(sampler.materialize(1000), InvalidArgument);
}

TEST(BathSampler, RealizationCsvHasOneRowPerSpin) {
  const auto nv = NvCenter::from_nm(5.0);
  const auto bath = sample_bath(sample_with(1e26), nv, 50e-9, 9);
  std::ostringstream os;
  write_realization_csv(os, bath, nv);
  std::istringstream is(os.str());
  std::string line;
  std::size_t rows = 0;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      EXPECT_EQ(line, "x_nm,y_nm,z_nm,kappa_sq_rad2_per_s2");
      header = true;
      continue;
    }
    ++rows;
  }
  EXPECT_EQ(rows, bath.positions.size());
}

// ---------------------------------------------------------- geometric sum

TEST(GeometricSum, TermExamples) {
  const Eigen::Vector3d z = nv_axis(0.0);
  EXPECT_NEAR(z.z(), 1.0, 1e-15);
  // A spin on the NV axis or perpendicular to it contributes nothing.
  EXPECT_EQ(geometric_term(Eigen::Vector3d(0, 0, 10e-9), z), 0.0);
  EXPECT_NEAR(geometric_term(Eigen::Vector3d(10e-9, 0, 0), z), 0.0, 1e-30);
  const double r = 10e-9;
  const Eigen::Vector3d p(r / std::sqrt(2.0), 0.0, r / std::sqrt(2.0));
  EXPECT_LE(rel_diff(geometric_term(p, z), 0.25 / std::pow(r, 6)), 1e-12);
  EXPECT_NEAR(nv_axis(kAlpha100).norm(), 1.0, 1e-15);
}

TEST(GeometricSum, SingleSpinGammaMatchesFrozen) {
  const auto nv = NvCenter(10e-9, 0.0);
  SpinBathRealization bath;
  bath.depth = nv.depth();
  bath.r_max = 100e-9;
  bath.sample = NuclearSample::immersion_oil();
  bath.positions.emplace_back(10e-9 / std::sqrt(2.0), 0.0, 10e-9 / std::sqrt(2.0));
  const auto gs = geometric_sum(bath, nv);
  EXPECT_EQ(gs.count, 1u);
  EXPECT_LE(rel_diff(gs.gamma, frozen::kSingleSpinGammaTermUz1OverSqrt2R10), 1e-10);
  EXPECT_LE(rel_diff(gs.b_rms_sq, 2.25 * frozen::kSingleSpinGammaTermUz1OverSqrt2R10), 1e-10);
}

TEST(GeometricSum, RejectsDepthMismatch) {
  const auto bath = sample_bath(sample_with(1e26), NvCenter::from_nm(5.0), 50e-9, 1);
  EXPECT_THROW(geometric_sum(bath, NvCenter::from_nm(6.0)), InvalidArgument);
}

TEST(GeometricSum, StreamingMatchesMaterializedAndIgnoresJobs) {
  const auto nv = NvCenter::from_nm(4.0);
  const BathSampler sampler(sample_with(3e27), nv, 40e-9, 17);
  const auto one = geometric_sum(sampler, PhysicalConstants::standard(), 1);
  const auto three = geometric_sum(sampler, PhysicalConstants::standard(), 3);
  EXPECT_EQ(one.count, three.count);
  EXPECT_EQ(one.sum, three.sum);
  EXPECT_EQ(one.b_rms_sq, three.b_rms_sq);
  const auto mat = geometric_sum(sampler.materialize(), nv);
  EXPECT_EQ(mat.count, one.count);
  EXPECT_LE(rel_diff(mat.sum, one.sum), 1e-12);
}

TEST(GeometricSum, UnbiasedOverSeeds) {
  // r_max = 30 d keeps the truncation bias below 0.03%.
  const auto nv = NvCenter::from_nm(2.0);
  const auto s = sample_with(2e26);
  const double r_max = 30.0 * nv.depth();
  const double expected = model::geometric_factor_reduced(nv.alpha(), nv.depth(), s.geometry());
  std::vector<double> values;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    values.push_back(geometric_sum(BathSampler(s, nv, r_max, 1000 + seed)).gamma_tilde);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (values.size() - 1);
  const double se = std::sqrt(var / values.size());
  const double tail = truncation_tail_bound(nv, s.geometry(), r_max);
  EXPECT_LE(std::abs(mean - expected), 4.0 * se + tail) << "mean " << mean << " expected " << expected;
}

// ------------------------------------------------------------- couplings

TEST(Coupling, KappaMatchesPointDipole) {
  const auto& k = PhysicalConstants::standard();
  const double gn = 2.68e8;
  const double dd = k.mu0_over_4pi() * k.hbar() * k.gamma_e() * gn;
  for_all(200, 62, [&](Gen& g) {
    const double alpha = g.uniform(0.0, kPi / 2);
    const Eigen::Vector3d r(g.uniform(-20e-9, 20e-9), g.uniform(-20e-9, 20e-9), g.uniform(2e-9, 20e-9));
    const auto c = coupling_for(r, alpha, gn, k);
    const double uz = r.normalized().dot(nv_axis(alpha));
    const double expected = 9.0 * dd * dd * uz * uz * (1.0 - uz * uz) / std::pow(r.norm(), 6);
    EXPECT_LE(std::abs(c.kappa_sq() - expected), 1e-10 * (expected + 1e-3 * dd * dd / std::pow(r.norm(), 6)));
  });
}

TEST(Coupling, BridgeIdentityPerRealization) {
  const auto nv = NvCenter::from_nm(5.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto bath = sample_bath(sample_with(2e26), nv, 50e-9, seed);
    const auto b = kappa_brms_bridge(bath, nv);
    EXPECT_EQ(b.count, bath.positions.size());
    EXPECT_LE(std::abs(b.relative_difference), 1e-10);
    EXPECT_GT(b.four_ge2_brms_sq_continuum, 0.0);
  }
}

// ------------------------------------------------------------ pseudospin

TEST(Pseudospin, SingleSpinDipMatchesFrozenPropagator) {
  const double wl = 5.28e6;
  const PseudospinCoupling weak{2e4, 0.0, 1.5e4};
  EXPECT_LE(rel_diff(single_spin_dip(weak, wl, 16, 1.002 * kPi / wl), frozen::kPseudospinDipN16), 1e-8);
  EXPECT_LE(rel_diff(single_spin_dip(weak, wl, 15, 1.002 * kPi / wl), frozen::kPseudospinDipN15), 1e-8);
  const PseudospinCoupling strong{8e5, 0.0, -3e5};
  EXPECT_LE(rel_diff(single_spin_dip(strong, wl, 8, kPi / wl), frozen::kPseudospinDipStrongN8), 1e-8);
}

TEST(Pseudospin, DipDependsOnKappaOnly) {
  const double wl = 5.28e6;
  const PseudospinCoupling x{2e4, 0.0, 1.5e4};
  const PseudospinCoupling xy{2e4 / std::sqrt(2.0), 2e4 / std::sqrt(2.0), 1.5e4};
  EXPECT_LE(rel_diff(single_spin_dip(x, wl, 16, 1.01 * kPi / wl), single_spin_dip(xy, wl, 16, 1.01 * kPi / wl)),
            1e-10);
}

TEST(Pseudospin, ZeroCouplingGivesUnitSignal) {
  const std::vector<PseudospinCoupling> spins(100, PseudospinCoupling{});
  const auto s = pseudospin_signal(spins, 5.28e6, 32, 5.95e-7);
  EXPECT_EQ(s.value, 1.0);
  EXPECT_EQ(s.log_value, 0.0);
  EXPECT_EQ(s.max_dip, 0.0);
  const auto e = pseudospin_signal({}, 5.28e6, 32, 5.95e-7);
  EXPECT_EQ(e.value, 1.0);
}

TEST(Pseudospin, SecondOrderIsQuarterKappaSqFilterProperty) {
  for_all(300, 63, [](Gen& g) {
    const double wl = g.log_uniform(1e6, 1e8);
    const long n = g.integer(1, 128);
    const double tau = kPi / wl * g.uniform(0.8, 1.2);
    const PseudospinCoupling c{g.uniform(-1e3, 1e3), g.uniform(-1e3, 1e3), g.uniform(-1e3, 1e3)};
    const double second = single_spin_dip_second_order(c, wl, n, tau);
    if (second < 0.0) return;
    const double expected = c.kappa_sq() / 8.0 * model::filter_function_sq_all_harmonics(wl, tau, n);
    EXPECT_LE(std::abs(second - expected), 1e-9 * expected + 1e-300);
  });
}

TEST(Pseudospin, ExactMatchesSecondOrderForWeakCouplingProperty) {
  for_all(300, 64, [](Gen& g) {
    const double wl = g.log_uniform(1e6, 1e8);
    const long n = 8 * g.integer(1, 16);
    const double tau = kPi / wl * (1.0 + g.uniform(-0.5, 0.5) / n);
    const double scale = wl * 1e-4 / n;
    const PseudospinCoupling c{g.uniform(-scale, scale), g.uniform(-scale, scale), g.uniform(-scale, scale)};
    const double exact = single_spin_dip(c, wl, n, tau);
    const double second = single_spin_dip_second_order(c, wl, n, tau);
    ASSERT_GE(second, 0.0);
    EXPECT_GE(exact, -1e-15);
    EXPECT_LE(std::abs(exact - second), 1e-3 * second + 1e-14);
  });
}

TEST(Pseudospin, ProductMatchesExponentialForManyWeakSpins) {
  const auto nv = NvCenter::from_nm(5.0);
  const BathSampler sampler(sample_with(68e27 / 50.0), nv, 50e-9, 2024);
  const double wl = 5.28e6;
  const long n = 16;
  const double tau = 1.003 * kPi / wl;
  const auto r = pseudospin_signal(sampler, wl, n, tau);
  ASSERT_GT(r.geometry.count, 100000u);
  EXPECT_LT(r.signal.max_dip, 1e-3);
  const double c_exp = model::contrast_from_brms(r.geometry.b_rms_sq, n, wl, DephasingTime::infinite(), tau,
                                                 PhysicalConstants::standard(), model::ContrastOptions{true});
  EXPECT_LE(std::abs(r.signal.value / c_exp - 1.0), 1e-3);
  EXPECT_LE(rel_diff(r.signal.log_value, std::log(c_exp)), 0.02);

  const auto second = pseudospin_signal(sampler, wl, n, tau, PseudospinBranch::SecondOrder);
  EXPECT_LE(std::abs(second.signal.value / r.signal.value - 1.0), 1e-4);
  const auto threaded = pseudospin_signal(sampler, wl, n, tau, PseudospinBranch::Exact,
                                          PhysicalConstants::standard(), 3);
  EXPECT_EQ(threaded.signal.value, r.signal.value);
  EXPECT_EQ(threaded.geometry.sum, r.geometry.sum);
}
