#include "nvnmr/pipeline/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/detail/least_squares.hpp"

namespace nvnmr::pipeline {

namespace {

constexpr double kPMin = 0.5;
constexpr double kPSpan = 3.5;

double exponent_from(double q) { return kPMin + kPSpan / (1.0 + std::exp(-q)); }
double exponent_to(double p) {
  const double f = (p - kPMin) / kPSpan;
  return std::log(f / (1.0 - f));
}

}  // namespace

ContrastTrace to_signal_contrast(const RawTrace& raw) {
  raw.validate();
  ContrastTrace out;
  out.stage = TraceStage::Signal;
  out.meta = raw.meta;
  out.tau = raw.tau;
  out.value.reserve(raw.size());
  out.sigma.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double a = raw.f0[i];
    const double b = raw.f1[i];
    const double total = a + b;
    out.value.push_back((a - b) / total);
    const double an = std::max(a, 1.0);
    const double bn = std::max(b, 1.0);
    const double tn = an + bn;
    double sigma = 2.0 * std::sqrt(an * an * bn + bn * bn * an) / (tn * tn);
    if (!raw.repetitions.empty()) sigma /= std::sqrt(raw.repetitions[i]);
    out.sigma.push_back(sigma);
  }
  return out;
}

double BackgroundFit::operator()(double tau) const {
  return amplitude * std::exp(-std::pow(static_cast<double>(n_pulses) * tau / t2, p));
}

double median_step(const std::vector<double>& tau) {
  if (tau.size() < 2) return 0.0;
  std::vector<double> d(tau.size() - 1);
  for (std::size_t i = 1; i < tau.size(); ++i) d[i - 1] = tau[i] - tau[i - 1];
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid;
}

NormalizationResult normalize_background(const ContrastTrace& signal, double dip_guess,
                                         const BackgroundOptions& opts) {
  signal.validate();
  if (signal.size() == 0) throw InvalidArgument("cannot normalize an empty trace");
  if (!(dip_guess >= signal.tau.front() && dip_guess <= signal.tau.back())) {
    throw InvalidArgument(fmt::format("dip guess {} s is outside the tau range [{}, {}] s", dip_guess,
                                      signal.tau.front(), signal.tau.back()));
  }
  const long n = signal.meta.n_pulses;
  if (n < 1) throw InvalidArgument("trace metadata has no pulse count");

  BackgroundFit bg;
  bg.n_pulses = n;
  bg.auto_window = !opts.window_half_width.has_value();
  const double half = opts.window_half_width.value_or(
      std::max(3.0 * median_step(signal.tau), 4.0 * dip_guess / static_cast<double>(n)));
  if (!(half >= 0.0)) throw InvalidArgument("window half-width must be >= 0");
  bg.window_lo = dip_guess - half;
  bg.window_hi = dip_guess + half;

  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    if (signal.tau[i] < bg.window_lo || signal.tau[i] > bg.window_hi) rows.push_back(i);
  }
  if (rows.size() < opts.min_points) {
    throw FitError(fmt::format(
        "only {} background points outside the dip window [{:.4g}, {:.4g}] s; need at least {}",
        rows.size(), bg.window_lo, bg.window_hi, opts.min_points));
  }
  bg.points_used = rows.size();

  double a0 = 0.0;
  for (auto i : rows) a0 = std::max(a0, signal.value[i]);
  if (!(a0 > 0.0)) throw FitError("background points are all <= 0; a positive decay cannot fit them");

  const double dn = static_cast<double>(n);
  const auto m = static_cast<int>(rows.size());
  detail::ResidualFn residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const double amp = std::exp(x[0]);
    const double t2 = std::exp(x[1]);
    const double p = exponent_from(x[2]);
    for (int k = 0; k < m; ++k) {
      const std::size_t i = rows[static_cast<std::size_t>(k)];
      const double model = amp * std::exp(-std::pow(dn * signal.tau[i] / t2, p));
      const double w = signal.has_sigma() ? signal.sigma[i] : 1.0;
      r[k] = (signal.value[i] - model) / w;
    }
  };

  const double span = dn * signal.tau.back();
  detail::LeastSquaresResult best;
  best.cost = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (double t2_scale : {0.5, 2.0, 10.0, 100.0}) {
    for (double p0 : {1.0, 2.0}) {
      Eigen::VectorXd x0(3);
      x0 << std::log(a0), std::log(t2_scale * span), exponent_to(p0);
      auto res = detail::levenberg_marquardt(residual, m, x0);
      if (!std::isfinite(res.cost)) continue;
      const bool better = res.converged ? (!any_converged || res.cost < best.cost)
                                        : (!any_converged && res.cost < best.cost);
      if (better) {
        best = res;
        any_converged = any_converged || res.converged;
      }
    }
  }
  if (!any_converged) {
    throw FitError(fmt::format("background fit did not converge from any start; best chi2 = {:.6g}",
                               best.cost));
  }
  bg.amplitude = std::exp(best.x[0]);
  bg.t2 = std::exp(best.x[1]);
  bg.p = exponent_from(best.x[2]);
  bg.chi2 = best.cost;

  NormalizationResult out;
  out.background = bg;
  out.normalized.stage = TraceStage::Normalized;
  out.normalized.meta = signal.meta;
  out.normalized.tau = signal.tau;
  out.normalized.value.reserve(signal.size());
  if (signal.has_sigma()) out.normalized.sigma.reserve(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double b = bg(signal.tau[i]);
    out.normalized.value.push_back(signal.value[i] / b);
    if (signal.has_sigma()) out.normalized.sigma.push_back(signal.sigma[i] / b);
  }
  return out;
}

}  // namespace nvnmr::pipeline
