#pragma once

#include <cmath>
#include <numbers>

namespace nvnmr::detail {

/// sin(x)/x with the removable singularity filled in.
inline double sinc(double x) noexcept {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// e^{-x} - 1 + x without cancellation for small x.
inline double exp_remainder2(double x) noexcept {
  if (std::abs(x) < 0.1) {
    // x^2/2 - x^3/6 + x^4/24 - ... ; 12 terms is below 1 ulp for |x| < 0.1
    double term = x * x / 2.0;
    double sum = 0.0;
    for (int n = 2; n < 14; ++n) {
      sum += term;
      term *= -x / static_cast<double>(n + 1);
    }
    return sum;
  }
  return std::expm1(-x) + x;
}

/// sin(n*y)/cos(y). For even n the poles at odd multiples of pi/2 are
/// removable and are evaluated through the nearest one, so the result stays
/// accurate arbitrarily close to them.
inline double sin_over_cos(long n, double y) noexcept {
  if (n % 2 != 0) return std::sin(static_cast<double>(n) * y) / std::cos(y);
  const double m = std::round(y / std::numbers::pi - 0.5);
  const double y0 = (m + 0.5) * std::numbers::pi;
  const double e = y - y0;
  const double dn = static_cast<double>(n);
  const double ratio = (e == 0.0) ? dn : std::sin(dn * e) / std::sin(e);
  // sin(n y0) = 0, cos(n y0) = (-1)^(n/2), sin(y0) = (-1)^m
  const bool neg_half = ((n / 2) % 2) != 0;
  const bool neg_m = std::fmod(std::abs(m), 2.0) != 0.0;
  const double sign = (neg_half != neg_m) ? 1.0 : -1.0;
  return sign * ratio;
}

/// Neumaier (improved Kahan) summation. Order of `add` calls still matters
/// for bitwise results; callers fix the order.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace nvnmr::detail
