#include "oracle_suite.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nvnmr/model/contrast.hpp"
#include "nvnmr/oracle/bath.hpp"
#include "nvnmr/oracle/pseudospin.hpp"

namespace nvnmr::cli {

PseudospinCase make_pseudospin_case(std::uint64_t seed, std::size_t index, double alpha, double gamma_n,
                                    const SampleGeometry& geometry, double target_spins,
                                    const PhysicalConstants& k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), 0x70736575u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PseudospinCase c;
  c.index = index;
  c.seed = rng();
  c.alpha = alpha;
  c.depth = (3.0 + 27.0 * unit(rng)) * 1e-9;
  c.n_pulses = 8 * (1 + static_cast<long>(unit(rng) * 16.0));
  if (c.n_pulses > 128) c.n_pulses = 128;

  const double g = k.gamma_e() * std::sqrt(k.dipolar_prefactor_sq(gamma_n)) / std::pow(c.depth, 3);
  const double kappa_max = 1.5 * g;
  const double dip_target = 0.5 * kWeakCouplingDip;
  c.omega_l = kappa_max * static_cast<double>(c.n_pulses) / std::sqrt(2.0 * dip_target);

  // Detuning within a quarter of the central lobe: (N tau / 2) delta in [-1/4, 1/4].
  const double tau0 = std::numbers::pi / c.omega_l;
  const double x = 0.5 * (unit(rng) - 0.5);
  const double delta = 2.0 * x / (static_cast<double>(c.n_pulses) * tau0);
  c.tau = std::numbers::pi / (c.omega_l - delta);

  c.r_max = 10.0 * c.depth;
  const NvCenter nv(c.depth, alpha);
  c.rho = target_spins / oracle::region_volume(nv, geometry, c.r_max);
  return c;
}

PseudospinCaseResult run_pseudospin_case(const PseudospinCase& c, double gamma_n, const SampleGeometry& geometry,
                                         int jobs, const PhysicalConstants& k) {
  NuclearSample::Params p;
  p.rho = c.rho;
  p.gamma_n = gamma_n;
  p.geometry = geometry;
  const NuclearSample sample(p);
  const NvCenter nv(c.depth, c.alpha);
  const oracle::BathSampler sampler(sample, nv, c.r_max, c.seed);
  const auto streamed =
      oracle::pseudospin_signal(sampler, c.omega_l, c.n_pulses, c.tau, oracle::PseudospinBranch::Exact, k, jobs);

  PseudospinCaseResult r;
  r.input = c;
  r.spins = streamed.geometry.count;
  r.product = streamed.signal.value;
  r.exponential = model::contrast_from_brms(streamed.geometry.b_rms_sq, c.n_pulses, c.omega_l,
                                            DephasingTime::infinite(), c.tau, k);
  r.relative_difference = r.product / r.exponential - 1.0;
  const double log_exp = std::log(r.exponential);
  r.log_relative_difference = log_exp != 0.0 ? streamed.signal.log_value / log_exp - 1.0 : 0.0;
  r.max_dip = streamed.signal.max_dip;
  r.weak_coupling = r.max_dip <= kWeakCouplingDip;
  return r;
}

}  // namespace nvnmr::cli
