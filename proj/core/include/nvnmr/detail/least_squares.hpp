#pragma once

#include <functional>

#include <Eigen/Core>

namespace nvnmr::detail {

/// Fills `r` (pre-sized to m) with residuals at `x`.
using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

struct LeastSquaresOptions {
  int max_evaluations = 4000;
  double ftol = 1e-12;
  double xtol = 1e-12;
  double step = 1e-6;  // central-difference step, relative with an absolute floor
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // sum of squared residuals
  int status = 0;     // Eigen LevenbergMarquardtSpace::Status
  int evaluations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt on `m` residuals with a central-difference Jacobian.
/// Non-finite residuals are replaced by a large penalty so the step is
/// rejected instead of poisoning the trust region.
LeastSquaresResult levenberg_marquardt(const ResidualFn& f, int m, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& opts = {});

/// Central-difference Jacobian of `f` at `x` with step h_j = step * max(1, |x_j|).
Eigen::MatrixXd numerical_jacobian(const ResidualFn& f, int m, const Eigen::VectorXd& x,
                                   double step = 1e-6);

}  // namespace nvnmr::detail
