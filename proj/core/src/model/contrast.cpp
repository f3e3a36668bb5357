#include "nvnmr/model/contrast.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/detail/numeric.hpp"
#include "nvnmr/model/geometry.hpp"
#include "nvnmr/model/kernel.hpp"

namespace nvnmr::model {

namespace {

using std::numbers::pi;

// K including the k = -1 harmonic (centred at -pi/tau) and the cross term.
// For a finite line both diagonal terms are Lorentzian-convolved; the cross
// term is taken at omega_L, where the line is narrow compared to its scale.
double k_with_off_resonant(long n, double tau, double omega_l, const DephasingTime& t2n) {
  const double total = static_cast<double>(n) * tau;
  const double res_phase = 0.5 * total * (omega_l - pi / tau);
  const double off_phase = 0.5 * total * (omega_l + pi / tau);
  const double parity = (n % 2 == 0) ? 1.0 : -1.0;
  const double cross = 2.0 * parity * total * total * detail::sinc(res_phase) * detail::sinc(off_phase);
  if (t2n.is_infinite()) {
    const double a = detail::sinc(res_phase);
    const double b = detail::sinc(off_phase);
    return total * total * (a * a + b * b) + cross;
  }
  // The -1 harmonic sits at -pi/tau, a detuning of omega_L + pi/tau; k_finite
  // computes its detuning as omega - pi/tau, hence the 2 pi/tau shift.
  const double t = t2n.seconds();
  const double off = k_finite(n, tau, omega_l + 2.0 * pi / tau, t);
  return k_finite(n, tau, omega_l, t) + off + cross;
}

}  // namespace

double contrast_from_brms(double b_rms_sq, long n_pulses, double omega_l, const DephasingTime& t2n,
                          double tau, const PhysicalConstants& k, const ContrastOptions& opts) {
  double kern = 0.0;
  if (opts.include_off_resonant) {
    kern = k_with_off_resonant(n_pulses, tau, omega_l, t2n);
  } else if (t2n.is_infinite()) {
    kern = k_infinite(n_pulses, tau, omega_l);
  } else {
    kern = k_finite(n_pulses, tau, omega_l, t2n.seconds());
  }
  const double ge = k.gamma_e();
  return std::exp(-(2.0 / (pi * pi)) * ge * ge * b_rms_sq * kern);
}

double contrast(const ContrastModelParams& p, double tau, const ContrastOptions& opts) {
  const double b2 = b_rms_squared(p.nv, p.sample, *p.constants);
  return contrast_from_brms(b2, p.n_pulses, p.omega_l, p.sample.t2n_star(), tau, *p.constants, opts);
}

std::vector<double> contrast_curve(const ContrastModelParams& p, std::span<const double> taus,
                                   const ContrastOptions& opts) {
  const double b2 = b_rms_squared(p.nv, p.sample, *p.constants);
  std::vector<double> out;
  out.reserve(taus.size());
  for (double tau : taus) {
    out.push_back(contrast_from_brms(b2, p.n_pulses, p.omega_l, p.sample.t2n_star(), tau, *p.constants, opts));
  }
  return out;
}

double dip_position(double omega_l) {
  if (!(omega_l > 0.0) || !std::isfinite(omega_l)) {
    throw InvalidArgument(fmt::format("dip position needs omega_L > 0, got {} rad/s", omega_l));
  }
  return pi / omega_l;
}

}  // namespace nvnmr::model
