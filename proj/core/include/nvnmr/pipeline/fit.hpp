#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "nvnmr/core/constants.hpp"
#include "nvnmr/core/types.hpp"
#include "nvnmr/model/contrast.hpp"
#include "nvnmr/pipeline/trace.hpp"

namespace nvnmr::pipeline {

enum class T2nMode { Finite, Infinite, Auto };

std::string_view to_string(T2nMode m) noexcept;
/// "finite", "infinite" or "auto"; throws InvalidArgument otherwise.
T2nMode parse_t2n_mode(std::string_view s);

/// Known sample and NV parameters plus fit policy.
struct FitConfig {
  double rho = 68e27;  // m^-3
  std::optional<double> rho_sigma;
  double gamma_n = kProtonGammaDefault;
  double alpha = kAlpha100;
  SampleGeometry geometry = SemiInfinite{};
  const PhysicalConstants* constants = &PhysicalConstants::standard();
  model::ContrastOptions model_options;

  T2nMode t2n_mode = T2nMode::Auto;
  /// Free omega_L is limited to +/- omega_window around gamma_n B0; when
  /// fixed it is held at gamma_n B0.
  bool omega_free = true;
  double omega_window = 0.05;

  double depth_min = 1e-9;  // coarse grid range, m
  double depth_max = 100e-9;
  int depth_grid = 41;
  double t2n_min = 1e-7;  // bounds of a finite T2n*, s
  double t2n_max = 1.0;

  /// chi2(infinite) - chi2(finite) needed to prefer finite T2n* in Auto mode.
  double model_selection_threshold = 9.0;
  /// Optima within this chi2 of the best are treated as tied.
  double tie_threshold = 1.0;
};

struct FitCandidate {
  double depth = 0.0;
  double chi2 = 0.0;
  bool converged = false;
  std::string note;
};

struct FitResult {
  T2nMode mode = T2nMode::Infinite;  // Finite or Infinite, never Auto
  bool joint = false;

  double depth = 0.0;        // m
  double depth_sigma = 0.0;  // includes rho uncertainty when given
  double depth_sigma_fit = 0.0;

  /// One Larmor frequency per distinct B0 among the traces.
  std::vector<double> group_b0;  // T
  std::vector<double> omega_l;   // rad/s
  std::vector<double> omega_l_sigma;
  bool omega_fixed = false;

  std::optional<double> t2n;  // s; empty in infinite mode
  std::optional<double> t2n_sigma;

  double chi2 = 0.0;
  double chi2_reduced = 0.0;
  int dof = 0;
  std::size_t points = 0;
  bool unit_weights = false;
  bool errors_scaled = false;  // sigma multiplied by sqrt(chi2_reduced)

  /// Covariance of the natural parameters named in `parameter_names`
  /// (depth in m, omega_L in rad/s, 1/T2n* in 1/s).
  Eigen::MatrixXd covariance;
  std::vector<std::string> parameter_names;

  bool ambiguous = false;
  std::string ambiguity_note;
  std::vector<FitCandidate> candidates;

  /// Auto mode: chi2 of the infinite and finite fits and their difference.
  std::optional<double> chi2_infinite;
  std::optional<double> chi2_finite;
  std::optional<double> depth_infinite;
  std::optional<double> depth_finite;

  // Held parameters.
  double rho = 0.0;
  std::optional<double> rho_sigma;
  double alpha = 0.0;
  double gamma_n = 0.0;
  double gamma_e = 0.0;
  std::vector<long> n_pulses;

  /// (data - model) / sigma per trace at the optimum.
  std::vector<std::vector<double>> residuals;
};

/// Weighted least squares of the contrast model against one normalized trace.
/// Throws InsufficientSignal when median(C) minus the lowest 5-point running
/// mean of C is below 2 median(sigma), and
/// FitError when no start converges inside the omega_L window.
FitResult fit_depth(const ContrastTrace& trace, const FitConfig& config);

/// Joint fit: depth and T2n* shared by all traces, omega_L shared per B0.
FitResult fit_depth(std::span<const ContrastTrace> traces, const FitConfig& config);

/// Model contrast for `trace`'s grid and metadata at the fitted parameters.
std::vector<double> fitted_curve(const FitResult& fit, const ContrastTrace& trace,
                                 const FitConfig& config);

/// Inverse-variance weighted mean depth of independent fits.
struct CombinedDepth {
  double depth = 0.0;
  double sigma = 0.0;
  std::size_t count = 0;
};
CombinedDepth combine_independent(std::span<const FitResult> fits);

struct BatchOutcome {
  std::optional<FitResult> result;
  std::string error;
  bool insufficient_signal = false;
};

/// Independent fits of many traces on up to `jobs` threads. Failures are
/// recorded per trace instead of thrown. Output order matches input order.
std::vector<BatchOutcome> fit_batch(std::span<const ContrastTrace> traces, const FitConfig& config,
                                    int jobs = 1);

}  // namespace nvnmr::pipeline
