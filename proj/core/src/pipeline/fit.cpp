#include "nvnmr/pipeline/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/core/units.hpp"
#include "nvnmr/detail/least_squares.hpp"
#include "nvnmr/detail/parallel.hpp"
#include "nvnmr/model/geometry.hpp"

namespace nvnmr::pipeline {

namespace {

using std::numbers::pi;

constexpr double kOmegaScale = 1e-3;  // omega_L offset unit in the fit vector
constexpr std::size_t kLocalStarts = 6;

double sigmoid(double q) { return 1.0 / (1.0 + std::exp(-q)); }
double logit(double f) { return std::log(f / (1.0 - f)); }

double median(std::vector<double> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

bool same_field(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

void check_signal(const ContrastTrace& t) {
  if (!t.has_sigma()) return;
  // The floor is taken from a 5-point running mean so that a few noisy
  // points cannot pass for a dip.
  constexpr std::size_t kWindow = 5;
  double floor = *std::min_element(t.value.begin(), t.value.end());
  if (t.size() >= 3 * kWindow) {
    floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + kWindow <= t.size(); ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) sum += t.value[i + k];
      floor = std::min(floor, sum / kWindow);
    }
  }
  const double amplitude = median(t.value) - floor;
  const double noise = median(t.sigma);
  if (amplitude < 2.0 * noise) {
    throw InsufficientSignal(fmt::format(
        "trace '{}': dip amplitude {:.3g} is below twice the median noise {:.3g}; the NV is too deep "
        "or the trace too noisy for a depth estimate",
        t.meta.id, amplitude, noise));
  }
}

struct Natural {
  double depth = 0.0;
  std::vector<double> omega;  // per group
  double t2n = std::numeric_limits<double>::infinity();
};

class Problem {
 public:
  Problem(std::span<const ContrastTrace> traces, const FitConfig& cfg, bool finite)
      : traces_(traces), cfg_(cfg), finite_(finite) {
    for (const auto& t : traces_) {
      if (!(t.meta.b0 > 0.0)) {
        throw InvalidArgument(fmt::format("trace '{}' has no static field (B0 must be > 0)", t.meta.id));
      }
      if (t.meta.n_pulses < 1) throw InvalidArgument(fmt::format("trace '{}' has no pulse count", t.meta.id));
      std::size_t g = 0;
      while (g < group_b0_.size() && !same_field(group_b0_[g], t.meta.b0)) ++g;
      if (g == group_b0_.size()) group_b0_.push_back(t.meta.b0);
      group_of_.push_back(g);
      points_ += t.size();
      if (!t.has_sigma()) unit_weights_ = true;
    }
    for (double b0 : group_b0_) omega0_.push_back(cfg_.gamma_n * b0);
    log_t2_lo_ = std::log(cfg_.t2n_min);
    log_t2_hi_ = std::log(cfg_.t2n_max);
    prefactor_ = cfg_.rho * cfg_.constants->dipolar_prefactor_sq(cfg_.gamma_n) * 2.25;
  }

  std::size_t groups() const { return group_b0_.size(); }
  std::size_t points() const { return points_; }
  bool unit_weights() const { return unit_weights_; }
  bool finite() const { return finite_; }
  const std::vector<double>& group_b0() const { return group_b0_; }
  const std::vector<double>& omega0() const { return omega0_; }
  std::size_t group_of(std::size_t trace) const { return group_of_[trace]; }

  int n_params() const {
    return 1 + (cfg_.omega_free ? static_cast<int>(groups()) : 0) + (finite_ ? 1 : 0);
  }

  Natural decode(const Eigen::VectorXd& x) const {
    Natural p;
    p.depth = std::exp(x[0]);
    Eigen::Index i = 1;
    for (std::size_t g = 0; g < groups(); ++g) {
      p.omega.push_back(cfg_.omega_free ? omega0_[g] * (1.0 + kOmegaScale * x[i++]) : omega0_[g]);
    }
    if (finite_) p.t2n = std::exp(log_t2_lo_ + (log_t2_hi_ - log_t2_lo_) * sigmoid(x[i]));
    return p;
  }

  Eigen::VectorXd encode(double depth, const std::vector<double>& omega, double t2n) const {
    Eigen::VectorXd x(n_params());
    x[0] = std::log(depth);
    Eigen::Index i = 1;
    if (cfg_.omega_free) {
      for (std::size_t g = 0; g < groups(); ++g) x[i++] = (omega[g] / omega0_[g] - 1.0) / kOmegaScale;
    }
    if (finite_) x[i] = logit((std::log(t2n) - log_t2_lo_) / (log_t2_hi_ - log_t2_lo_));
    return x;
  }

  double b_rms_sq(double depth) const {
    return prefactor_ * model::geometric_factor_reduced(cfg_.alpha, depth, cfg_.geometry);
  }

  double model_value(const Natural& p, double b2, std::size_t trace, double tau) const {
    const auto& t = traces_[trace];
    const DephasingTime t2 = std::isfinite(p.t2n) ? DephasingTime::finite(p.t2n) : DephasingTime::infinite();
    return model::contrast_from_brms(b2, t.meta.n_pulses, p.omega[group_of_[trace]], t2, tau,
                                     *cfg_.constants, cfg_.model_options);
  }

  void residuals(const Natural& p, Eigen::VectorXd& r) const {
    if (!(p.depth > 0.0) || !std::isfinite(p.depth) || !(p.t2n > 0.0)) {
      r.setConstant(std::numeric_limits<double>::quiet_NaN());
      return;
    }
    const double b2 = b_rms_sq(p.depth);
    Eigen::Index k = 0;
    for (std::size_t ti = 0; ti < traces_.size(); ++ti) {
      const auto& t = traces_[ti];
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double w = t.has_sigma() ? t.sigma[i] : 1.0;
        r[k++] = (t.value[i] - model_value(p, b2, ti, t.tau[i])) / w;
      }
    }
  }

  double cost(const Natural& p) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(points_));
    residuals(p, r);
    const double c = r.squaredNorm();
    return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
  }

  // Natural parameter vector for the covariance: depth, free omegas, 1/T2n*.
  Eigen::VectorXd natural_vector(const Natural& p) const {
    Eigen::VectorXd v(n_params());
    Eigen::Index i = 0;
    v[i++] = p.depth;
    if (cfg_.omega_free) {
      for (double w : p.omega) v[i++] = w;
    }
    if (finite_) v[i] = 1.0 / p.t2n;
    return v;
  }

  Natural from_natural(const Eigen::VectorXd& v) const {
    Natural p;
    Eigen::Index i = 0;
    p.depth = v[i++];
    for (std::size_t g = 0; g < groups(); ++g) p.omega.push_back(cfg_.omega_free ? v[i++] : omega0_[g]);
    if (finite_) p.t2n = v[i] > 0.0 ? 1.0 / v[i] : std::numeric_limits<double>::infinity();
    return p;
  }

  std::vector<std::string> natural_names() const {
    std::vector<std::string> names{"depth_m"};
    if (cfg_.omega_free) {
      for (std::size_t g = 0; g < groups(); ++g) {
        names.push_back(groups() == 1 ? std::string("omega_l_rad_per_s")
                                      : fmt::format("omega_l_rad_per_s[{}]", g));
      }
    }
    if (finite_) names.emplace_back("inv_t2n_per_s");
    return names;
  }

  // Free-precession time of the deepest point among a group's traces.
  double data_minimum_tau(std::size_t g) const {
    double best_value = std::numeric_limits<double>::infinity();
    double best_tau = pi / omega0_[g];
    for (std::size_t ti = 0; ti < traces_.size(); ++ti) {
      if (group_of_[ti] != g) continue;
      const auto& t = traces_[ti];
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.value[i] < best_value) {
          best_value = t.value[i];
          best_tau = t.tau[i];
        }
      }
    }
    return best_tau;
  }

  double longest_sequence() const {
    double out = 0.0;
    for (std::size_t ti = 0; ti < traces_.size(); ++ti) {
      out = std::max(out, static_cast<double>(traces_[ti].meta.n_pulses) * pi / omega0_[group_of_[ti]]);
    }
    return out;
  }

  bool omega_in_window(const Natural& p) const {
    if (!cfg_.omega_free) return true;
    for (std::size_t g = 0; g < groups(); ++g) {
      if (std::abs(p.omega[g] / omega0_[g] - 1.0) > cfg_.omega_window) return false;
    }
    return true;
  }

  const FitConfig& config() const { return cfg_; }
  std::span<const ContrastTrace> traces() const { return traces_; }

 private:
  std::span<const ContrastTrace> traces_;
  const FitConfig& cfg_;
  bool finite_;
  std::vector<double> group_b0_;
  std::vector<std::size_t> group_of_;
  std::vector<double> omega0_;
  std::size_t points_ = 0;
  bool unit_weights_ = false;
  double log_t2_lo_ = 0.0;
  double log_t2_hi_ = 0.0;
  double prefactor_ = 0.0;
};

struct Start {
  double cost;
  std::size_t depth_index;
  Eigen::VectorXd x;
};

struct Optimum {
  Natural params;
  double cost;
};

FitResult run_mode(std::span<const ContrastTrace> traces, const FitConfig& cfg, bool finite) {
  Problem prob(traces, cfg, finite);
  const auto m = static_cast<int>(prob.points());
  if (static_cast<int>(prob.points()) <= prob.n_params()) {
    throw FitError(fmt::format("{} points cannot constrain {} parameters", prob.points(), prob.n_params()));
  }

  // Coarse grid.
  std::vector<std::vector<double>> omega_seeds;
  omega_seeds.push_back(prob.omega0());
  if (cfg.omega_free) {
    std::vector<double> from_data;
    for (std::size_t g = 0; g < prob.groups(); ++g) {
      const double w0 = prob.omega0()[g];
      const double lim = 0.999 * cfg.omega_window;
      from_data.push_back(std::clamp(pi / prob.data_minimum_tau(g), w0 * (1.0 - lim), w0 * (1.0 + lim)));
    }
    omega_seeds.push_back(std::move(from_data));
  }
  std::vector<double> t2_seeds{std::numeric_limits<double>::infinity()};
  if (finite) {
    t2_seeds.clear();
    const double span = prob.longest_sequence();
    for (double f : {0.5, 2.0, 10.0, 100.0}) {
      t2_seeds.push_back(std::clamp(f * span, cfg.t2n_min * 1.01, cfg.t2n_max * 0.99));
    }
  }
  std::vector<Start> grid;
  const int nd = std::max(cfg.depth_grid, 2);
  for (int k = 0; k < nd; ++k) {
    const double depth = cfg.depth_min * std::pow(cfg.depth_max / cfg.depth_min, static_cast<double>(k) / (nd - 1));
    for (const auto& omegas : omega_seeds) {
      for (double t2 : t2_seeds) {
        Eigen::VectorXd x = prob.encode(depth, omegas, t2);
        grid.push_back({prob.cost(prob.decode(x)), static_cast<std::size_t>(k), x});
      }
    }
  }
  std::stable_sort(grid.begin(), grid.end(), [](const Start& a, const Start& b) { return a.cost < b.cost; });

  std::vector<Start> starts;
  for (const auto& s : grid) {
    if (starts.size() == kLocalStarts) break;
    const bool seen = std::any_of(starts.begin(), starts.end(),
                                  [&](const Start& o) { return o.depth_index == s.depth_index; });
    if (!seen) starts.push_back(s);
  }

  // Local refinement.
  detail::ResidualFn residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    prob.residuals(prob.decode(x), r);
  };
  FitResult out;
  std::vector<Optimum> optima;
  for (const auto& s : starts) {
    const auto res = detail::levenberg_marquardt(residual, m, s.x);
    const Natural p = prob.decode(res.x);
    FitCandidate c{p.depth, res.cost, res.converged, {}};
    if (!res.converged) {
      c.note = fmt::format("no convergence (status {})", res.status);
    } else if (!prob.omega_in_window(p)) {
      c.note = "omega_L left the allowed window";
      c.converged = false;
    } else {
      optima.push_back({p, res.cost});
    }
    out.candidates.push_back(std::move(c));
  }
  if (optima.empty()) {
    std::string trail;
    for (const auto& c : out.candidates) {
      trail += fmt::format("\n  d = {:.4g} nm, chi2 = {:.6g}: {}", units::m_to_nm(c.depth), c.chi2, c.note);
    }
    throw FitError(fmt::format("depth fit did not converge from any start{}", trail));
  }

  // Lowest chi2; near-ties resolved toward the shallower depth.
  const auto best_it = std::min_element(optima.begin(), optima.end(),
                                        [](const Optimum& a, const Optimum& b) { return a.cost < b.cost; });
  const Optimum best = *best_it;
  Optimum chosen = best;
  for (const auto& o : optima) {
    if (o.cost - best.cost < cfg.tie_threshold && std::abs(o.params.depth / best.params.depth - 1.0) > 1e-3) {
      out.ambiguous = true;
      if (o.params.depth < chosen.params.depth) chosen = o;
    }
  }
  if (out.ambiguous) {
    out.ambiguity_note = fmt::format(
        "optima within delta chi2 < {} at different depths; lowest chi2 at {:.4g} nm, reporting the "
        "shallower {:.4g} nm",
        cfg.tie_threshold, units::m_to_nm(best.params.depth), units::m_to_nm(chosen.params.depth));
  }

  // Covariance in natural parameters.
  const Natural& p = chosen.params;
  const Eigen::VectorXd v = prob.natural_vector(p);
  detail::ResidualFn natural_residual = [&](const Eigen::VectorXd& nv, Eigen::VectorXd& r) {
    prob.residuals(prob.from_natural(nv), r);
  };
  Eigen::MatrixXd jac(m, v.size());
  {
    Eigen::VectorXd vp = v;
    Eigen::VectorXd rp(m);
    Eigen::VectorXd rm(m);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double h = 1e-6 * std::max(std::abs(v[j]), j == v.size() - 1 && finite ? 1e-3 : 0.0);
      vp[j] = v[j] + h;
      natural_residual(vp, rp);
      vp[j] = v[j] - h;
      natural_residual(vp, rm);
      vp[j] = v[j];
      jac.col(j) = (rp - rm) / (2.0 * h);
    }
  }
  Eigen::VectorXd scale = jac.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (!(scale[j] > 0.0) || !std::isfinite(scale[j])) scale[j] = 1.0;
  }
  const Eigen::MatrixXd js = jac * scale.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd info = js.transpose() * js;
  Eigen::MatrixXd cov = info.completeOrthogonalDecomposition().pseudoInverse();
  cov = scale.cwiseInverse().asDiagonal() * cov * scale.cwiseInverse().asDiagonal();

  out.mode = finite ? T2nMode::Finite : T2nMode::Infinite;
  out.joint = traces.size() > 1;
  out.points = prob.points();
  out.dof = static_cast<int>(prob.points()) - prob.n_params();
  out.chi2 = chosen.cost;
  out.chi2_reduced = chosen.cost / out.dof;
  out.unit_weights = prob.unit_weights();
  out.errors_scaled = out.unit_weights || out.chi2_reduced > 1.0;
  if (out.errors_scaled) cov *= out.chi2_reduced;
  out.covariance = cov;
  out.parameter_names = prob.natural_names();

  out.depth = p.depth;
  out.depth_sigma_fit = std::sqrt(std::max(cov(0, 0), 0.0));
  out.depth_sigma = out.depth_sigma_fit;
  if (cfg.rho_sigma) {
    const double from_rho = p.depth / (3.0 * cfg.rho) * *cfg.rho_sigma;
    out.depth_sigma = std::hypot(out.depth_sigma_fit, from_rho);
  }
  out.group_b0 = prob.group_b0();
  out.omega_l = p.omega;
  out.omega_fixed = !cfg.omega_free;
  Eigen::Index idx = 1;
  for (std::size_t g = 0; g < prob.groups(); ++g) {
    if (cfg.omega_free) {
      out.omega_l_sigma.push_back(std::sqrt(std::max(cov(idx, idx), 0.0)));
      ++idx;
    } else {
      out.omega_l_sigma.push_back(0.0);
    }
  }
  if (finite) {
    out.t2n = p.t2n;
    const double rate = 1.0 / p.t2n;
    const double rate_sigma = std::sqrt(std::max(cov(idx, idx), 0.0));
    out.t2n_sigma = rate_sigma / (rate * rate);
  }

  out.rho = cfg.rho;
  out.rho_sigma = cfg.rho_sigma;
  out.alpha = cfg.alpha;
  out.gamma_n = cfg.gamma_n;
  out.gamma_e = cfg.constants->gamma_e();
  Eigen::VectorXd r(m);
  prob.residuals(p, r);
  Eigen::Index k = 0;
  for (const auto& t : traces) {
    out.n_pulses.push_back(t.meta.n_pulses);
    out.residuals.emplace_back(r.data() + k, r.data() + k + static_cast<Eigen::Index>(t.size()));
    k += static_cast<Eigen::Index>(t.size());
  }
  return out;
}

}  // namespace

std::string_view to_string(T2nMode m) noexcept {
  switch (m) {
    case T2nMode::Finite:
      return "finite";
    case T2nMode::Infinite:
      return "infinite";
    case T2nMode::Auto:
      return "auto";
  }
  return "auto";
}

T2nMode parse_t2n_mode(std::string_view s) {
  if (s == "finite") return T2nMode::Finite;
  if (s == "infinite") return T2nMode::Infinite;
  if (s == "auto") return T2nMode::Auto;
  throw InvalidArgument(fmt::format("unknown T2n* mode '{}' (expected finite, infinite or auto)", s));
}

FitResult fit_depth(const ContrastTrace& trace, const FitConfig& config) {
  return fit_depth(std::span<const ContrastTrace>(&trace, 1), config);
}

FitResult fit_depth(std::span<const ContrastTrace> traces, const FitConfig& config) {
  if (traces.empty()) throw InvalidArgument("no traces to fit");
  if (!(config.rho > 0.0)) throw InvalidArgument("fit needs a positive spin density");
  if (!(config.depth_min > 0.0) || !(config.depth_max > config.depth_min)) {
    throw InvalidArgument("depth grid bounds must satisfy 0 < min < max");
  }
  if (!(config.t2n_min > 0.0) || !(config.t2n_max > config.t2n_min)) {
    throw InvalidArgument("T2n* bounds must satisfy 0 < min < max");
  }
  for (const auto& t : traces) {
    t.validate();
    check_signal(t);
  }

  if (config.t2n_mode == T2nMode::Infinite) return run_mode(traces, config, false);
  if (config.t2n_mode == T2nMode::Finite) return run_mode(traces, config, true);

  std::optional<FitResult> inf;
  std::optional<FitResult> fin;
  std::string inf_error;
  std::string fin_error;
  try {
    inf = run_mode(traces, config, false);
  } catch (const FitError& e) {
    inf_error = e.what();
  }
  try {
    fin = run_mode(traces, config, true);
  } catch (const FitError& e) {
    fin_error = e.what();
  }
  if (!inf && !fin) throw FitError(fmt::format("infinite T2n*: {}\nfinite T2n*: {}", inf_error, fin_error));
  FitResult out;
  if (inf && fin) {
    out = (inf->chi2 - fin->chi2 >= config.model_selection_threshold) ? *fin : *inf;
  } else {
    out = inf ? *inf : *fin;
  }
  if (inf) {
    out.chi2_infinite = inf->chi2;
    out.depth_infinite = inf->depth;
  }
  if (fin) {
    out.chi2_finite = fin->chi2;
    out.depth_finite = fin->depth;
  }
  return out;
}

std::vector<double> fitted_curve(const FitResult& fit, const ContrastTrace& trace, const FitConfig& config) {
  std::size_t g = 0;
  while (g < fit.group_b0.size() && !same_field(fit.group_b0[g], trace.meta.b0)) ++g;
  if (g == fit.group_b0.size()) {
    throw InvalidArgument(fmt::format("trace '{}' was measured at a field not in the fit", trace.meta.id));
  }
  const double b2 = fit.rho * config.constants->dipolar_prefactor_sq(fit.gamma_n) * 2.25 *
                    model::geometric_factor_reduced(fit.alpha, fit.depth, config.geometry);
  const DephasingTime t2 = fit.t2n ? DephasingTime::finite(*fit.t2n) : DephasingTime::infinite();
  std::vector<double> out;
  out.reserve(trace.size());
  for (double tau : trace.tau) {
    out.push_back(model::contrast_from_brms(b2, trace.meta.n_pulses, fit.omega_l[g], t2, tau,
                                            *config.constants, config.model_options));
  }
  return out;
}

CombinedDepth combine_independent(std::span<const FitResult> fits) {
  CombinedDepth out;
  double wsum = 0.0;
  double acc = 0.0;
  for (const auto& f : fits) {
    if (!(f.depth_sigma > 0.0)) throw InvalidArgument("cannot weight a fit with zero depth uncertainty");
    const double w = 1.0 / (f.depth_sigma * f.depth_sigma);
    wsum += w;
    acc += w * f.depth;
    ++out.count;
  }
  if (out.count == 0) throw InvalidArgument("no fits to combine");
  out.depth = acc / wsum;
  out.sigma = 1.0 / std::sqrt(wsum);
  return out;
}

std::vector<BatchOutcome> fit_batch(std::span<const ContrastTrace> traces, const FitConfig& config, int jobs) {
  std::vector<BatchOutcome> out(traces.size());
  detail::parallel_for(traces.size(), jobs, [&](std::size_t i) {
    try {
      out[i].result = fit_depth(traces[i], config);
    } catch (const InsufficientSignal& e) {
      out[i].error = e.what();
      out[i].insufficient_signal = true;
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace nvnmr::pipeline
