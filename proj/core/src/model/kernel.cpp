#include "nvnmr/model/kernel.hpp"

#include <cmath>
#include <complex>

#include "nvnmr/detail/numeric.hpp"

namespace nvnmr::model {

namespace {

// (e^{-s} - 1 + s) / s^2 for complex s. The power series has no cancellation
// for small |s|; 18 terms reach double precision for |s| < 0.5.
std::complex<double> exp_remainder2_over_sq(std::complex<double> s) {
  if (std::abs(s) < 0.5) {
    std::complex<double> term{0.5, 0.0};  // (-s)^0 / 2!
    std::complex<double> sum{0.0, 0.0};
    for (int n = 0; n < 18; ++n) {
      sum += term;
      term *= -s / static_cast<double>(n + 3);
    }
    return sum;
  }
  return (std::exp(-s) - 1.0 + s) / (s * s);
}

}  // namespace

double k_infinite(long n_pulses, double tau, double omega_l) {
  const double total = static_cast<double>(n_pulses) * tau;
  const double s = detail::sinc(0.5 * total * detuning(tau, omega_l));
  return total * total * s * s;
}

double k_finite(long n_pulses, double tau, double omega_l, double t2n_star) {
  const double total = static_cast<double>(n_pulses) * tau;
  const double delta = detuning(tau, omega_l);
  const double x = total / t2n_star;
  const double r = delta * t2n_star;

  if (std::abs(r) < kResonanceSeriesThreshold) {
    // Second order in r = delta T2n*:
    //   K = 2 T2^2 [phi(x) + r^2 (1 + x - e^{-x}(1 + 2x + x^2/2))] / (1 + r^2)^2,
    // phi(x) = e^{-x} - 1 + x. The r^4 remainder is below 1e-16 relative here.
    const double phi = detail::exp_remainder2(x);
    const double b1 = 1.0 + x - std::exp(-x) * (1.0 + 2.0 * x + 0.5 * x * x);
    const double r2 = r * r;
    const double denom = (1.0 + r2) * (1.0 + r2);
    return 2.0 * t2n_star * t2n_star * (phi + r2 * b1) / denom;
  }

  // The closed form equals 2 (N tau)^2 Re[(e^{-s} - 1 + s)/s^2] with
  // s = N tau / T2n* - i delta N tau.
  const std::complex<double> s{x, -delta * total};
  return 2.0 * total * total * exp_remainder2_over_sq(s).real();
}

}  // namespace nvnmr::model
