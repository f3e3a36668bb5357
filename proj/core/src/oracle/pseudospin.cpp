#include "nvnmr/oracle/pseudospin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/detail/numeric.hpp"
#include "nvnmr/detail/parallel.hpp"
#include "nvnmr/model/geometry.hpp"

namespace nvnmr::oracle {

namespace {

using cplx = std::complex<double>;

// 2x2 SU(2) matrix [[a, -conj(b)], [b, conj(a)]].
struct Su2 {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
};

Su2 mul(const Su2& p, const Su2& q) {
  return {p.a * q.a - std::conj(p.b) * q.b, p.b * q.a + std::conj(p.a) * q.b};
}

// exp(-i t w . sigma/2)
Su2 rotation(double wx, double wy, double wz, double t) {
  const double w = std::sqrt(wx * wx + wy * wy + wz * wz);
  if (w == 0.0) return {};
  const double h = 0.5 * w * t;
  const double s = std::sin(h) / w;
  return {cplx{std::cos(h), -wz * s}, cplx{wy * s, -wx * s}};
}

// Direct two-branch evolution, used for odd N where the closed form does not apply.
double propagated_signal(const PseudospinCoupling& c, double omega_l, long n, double tau) {
  const double w[2][3] = {{0.0, 0.0, omega_l}, {c.a_zx, c.a_zy, omega_l + c.a_zz}};
  Su2 ua;
  Su2 ub;
  for (long i = 0; i <= n; ++i) {
    const double t = (i == 0 || i == n) ? 0.5 * tau : tau;
    const auto* wa = w[i % 2];
    const auto* wb = w[(i + 1) % 2];
    ua = mul(rotation(wa[0], wa[1], wa[2], t), ua);
    ub = mul(rotation(wb[0], wb[1], wb[2], t), ub);
  }
  // Re Tr(Ua^dagger Ub) / 2
  return (std::conj(ua.a) * ub.a + ua.b * std::conj(ub.b)).real();
}

}  // namespace

PseudospinCoupling coupling_for(const Eigen::Vector3d& r, double alpha_rad, double gamma_n,
                                const PhysicalConstants& k) {
  const double dist = r.norm();
  if (!(dist > 0.0)) throw InvalidArgument("nuclear spin at the NV position");
  const double sa = std::sin(alpha_rad);
  const double ca = std::cos(alpha_rad);
  const Eigen::Vector3d u = r / dist;
  const double ux = ca * u.x() - sa * u.z();
  const double uy = u.y();
  const double uz = sa * u.x() + ca * u.z();
  const double field = k.mu0_over_4pi() * k.hbar() * gamma_n / (dist * dist * dist);
  const double g = k.gamma_e() * field;
  return {3.0 * g * ux * uz, 3.0 * g * uy * uz, g * (3.0 * uz * uz - 1.0)};
}

std::vector<PseudospinCoupling> couplings(const SpinBathRealization& bath, const NvCenter& nv,
                                          const PhysicalConstants& k) {
  std::vector<PseudospinCoupling> out;
  out.reserve(bath.positions.size());
  for (const auto& p : bath.positions) out.push_back(coupling_for(p, nv.alpha(), bath.sample.gamma_n(), k));
  return out;
}

double single_spin_dip(const PseudospinCoupling& c, double omega_l, long n, double tau) {
  if (n < 1) throw InvalidArgument(fmt::format("N must be >= 1, got {}", n));
  if (n % 2 != 0) return 1.0 - propagated_signal(c, omega_l, n, tau);
  const double kappa_sq = c.kappa_sq();
  if (kappa_sq == 0.0) return 0.0;
  const double w1z = omega_l + c.a_zz;
  const double w1_sq = kappa_sq + w1z * w1z;
  const double w1 = std::sqrt(w1_sq);
  const double dot = w1z / w1;  // n0 . n1
  const double h0 = 0.5 * omega_l * tau;
  const double h1 = 0.5 * w1 * tau;
  const double cos_a = std::cos(h0) * std::cos(h1) - dot * std::sin(h0) * std::sin(h1);
  const double half = 0.5 * std::acos(std::clamp(cos_a, -1.0, 1.0));
  const double s0 = std::sin(0.5 * h0);
  const double s1 = std::sin(0.5 * h1);
  const double ratio = detail::sin_over_cos(n, half);
  return 2.0 * (kappa_sq / w1_sq) * s0 * s0 * s1 * s1 * ratio * ratio;
}

double single_spin_dip_second_order(const PseudospinCoupling& c, double omega_l, long n, double tau) {
  const double h = 0.5 * omega_l * tau;
  if (std::abs(std::cos(h)) < 1e-6) return -1.0;
  const double s = std::sin(0.5 * h);
  const double ratio = std::sin(static_cast<double>(n) * h) / std::cos(h);
  return 2.0 * c.kappa_sq() / (omega_l * omega_l) * s * s * s * s * ratio * ratio;
}

namespace {

struct SignalAccumulator {
  detail::CompensatedSum log_sum;
  bool negative = false;
  bool zero = false;
  double max_dip = 0.0;
  std::size_t fallbacks = 0;

  void add(const PseudospinCoupling& c, double omega_l, long n, double tau, PseudospinBranch branch) {
    double dip = -1.0;
    if (branch == PseudospinBranch::SecondOrder) {
      dip = single_spin_dip_second_order(c, omega_l, n, tau);
      if (dip < 0.0) ++fallbacks;
    }
    if (dip < 0.0) dip = single_spin_dip(c, omega_l, n, tau);
    max_dip = std::max(max_dip, dip);
    const double s = 1.0 - dip;
    if (s == 0.0) {
      zero = true;
      return;
    }
    if (s < 0.0) negative = !negative;
    // log1p keeps the ~1e-10 per-spin dips of distant spins.
    log_sum.add(s > 0.0 ? std::log1p(-dip) : std::log(-s));
  }

  void merge(const SignalAccumulator& o) {
    log_sum.add(o.log_sum);
    negative = negative != o.negative;
    zero = zero || o.zero;
    max_dip = std::max(max_dip, o.max_dip);
    fallbacks += o.fallbacks;
  }

  PseudospinSignal result() const {
    PseudospinSignal out;
    out.max_dip = max_dip;
    out.fallbacks = fallbacks;
    out.log_value = zero ? -std::numeric_limits<double>::infinity() : log_sum.value();
    out.value = zero ? 0.0 : (negative ? -1.0 : 1.0) * std::exp(out.log_value);
    return out;
  }
};

void check_sequence(double omega_l, long n, double tau) {
  if (!(omega_l > 0.0)) throw InvalidArgument(fmt::format("omega_L must be > 0, got {}", omega_l));
  if (!(tau > 0.0)) throw InvalidArgument(fmt::format("tau must be > 0, got {}", tau));
  if (n < 1) throw InvalidArgument(fmt::format("N must be >= 1, got {}", n));
}

}  // namespace

PseudospinSignal pseudospin_signal(std::span<const PseudospinCoupling> spins, double omega_l,
                                   long n_pulses, double tau, PseudospinBranch branch) {
  check_sequence(omega_l, n_pulses, tau);
  SignalAccumulator acc;
  for (const auto& c : spins) acc.add(c, omega_l, n_pulses, tau, branch);
  return acc.result();
}

StreamedPseudospin pseudospin_signal(const BathSampler& sampler, double omega_l, long n_pulses,
                                     double tau, PseudospinBranch branch, const PhysicalConstants& k,
                                     int jobs) {
  check_sequence(omega_l, n_pulses, tau);
  struct Part {
    SignalAccumulator signal;
    std::size_t count = 0;
    detail::CompensatedSum sum;
    detail::CompensatedSum sum_sq;
  };
  const double alpha = sampler.nv().alpha();
  const double gamma_n = sampler.sample().gamma_n();
  const Eigen::Vector3d axis = nv_axis(alpha);
  std::vector<Part> parts(sampler.chunk_count());
  detail::parallel_for(parts.size(), jobs, [&](std::size_t i) {
    thread_local std::vector<Eigen::Vector3d> buffer;
    buffer.clear();
    sampler.generate_chunk(i, buffer);
    Part& part = parts[i];
    part.count = buffer.size();
    for (const auto& p : buffer) {
      part.signal.add(coupling_for(p, alpha, gamma_n, k), omega_l, n_pulses, tau, branch);
      const double t = geometric_term(p, axis);
      part.sum.add(t);
      part.sum_sq.add(t * t);
    }
  });
  SignalAccumulator signal;
  std::size_t count = 0;
  detail::CompensatedSum sum;
  detail::CompensatedSum sum_sq;
  for (const auto& part : parts) {
    signal.merge(part.signal);
    count += part.count;
    sum.add(part.sum);
    sum_sq.add(part.sum_sq);
  }
  return {signal.result(),
          GeometricSum::from_sums(count, sum.value(), sum_sq.value(), sampler.sample(), k)};
}

KappaBridge kappa_brms_bridge(const SpinBathRealization& bath, const NvCenter& nv,
                              const PhysicalConstants& k) {
  KappaBridge out;
  out.count = bath.positions.size();
  detail::CompensatedSum sum;
  for (const auto& p : bath.positions) sum.add(coupling_for(p, nv.alpha(), bath.sample.gamma_n(), k).kappa_sq());
  out.sum_kappa_sq = sum.value();
  const double ge2 = k.gamma_e() * k.gamma_e();
  out.four_ge2_brms_sq = 4.0 * ge2 * geometric_sum(bath, nv, k).b_rms_sq;
  out.four_ge2_brms_sq_continuum = 4.0 * ge2 * model::b_rms_squared(nv, bath.sample, k);
  if (out.four_ge2_brms_sq > 0.0) {
    out.relative_difference = out.sum_kappa_sq / out.four_ge2_brms_sq - 1.0;
  }
  if (out.four_ge2_brms_sq_continuum > 0.0) {
    out.continuum_difference = out.sum_kappa_sq / out.four_ge2_brms_sq_continuum - 1.0;
  }
  return out;
}

}  // namespace nvnmr::oracle
