#include "nvnmr/model/filter_function.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "nvnmr/detail/numeric.hpp"

namespace nvnmr::model {

double filter_function_sq(double omega, double tau, long n_pulses, int k_max) {
  using std::numbers::pi;
  const double total = static_cast<double>(n_pulses) * tau;
  std::complex<double> g{0.0, 0.0};
  for (int k = -k_max - 1; k <= k_max; ++k) {
    const double harmonic = static_cast<double>(2 * k + 1);
    const double phase = 0.5 * total * (omega - harmonic * pi / tau);
    const double weight = (k % 2 == 0 ? 1.0 : -1.0) / harmonic;
    g += weight * detail::sinc(phase) * std::polar(1.0, -phase);
  }
  g *= 2.0 / pi * total;
  return std::norm(g);
}

double filter_function_sq_all_harmonics(double omega, double tau, long n_pulses) {
  // (16/w^2) sin^4(w tau/4) = tau^2 sinc^2(w tau/4) sin^2(w tau/4)
  const double quarter = 0.25 * omega * tau;
  const double env = tau * detail::sinc(quarter) * std::sin(quarter);
  const double ratio = detail::sin_over_cos(n_pulses, 0.5 * omega * tau);
  return env * env * ratio * ratio;
}

std::vector<ModulationSegment> modulation_segments(double tau, long n_pulses) {
  std::vector<ModulationSegment> out;
  out.reserve(static_cast<std::size_t>(n_pulses) + 1);
  double t = 0.0;
  int sign = 1;
  for (long i = 0; i <= n_pulses; ++i) {
    const double len = (i == 0 || i == n_pulses) ? 0.5 * tau : tau;
    out.push_back({t, len, sign});
    t += len;
    sign = -sign;
  }
  return out;
}

}  // namespace nvnmr::model
