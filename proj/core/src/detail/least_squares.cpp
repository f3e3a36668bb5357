#include "nvnmr/detail/least_squares.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/NonLinearOptimization>

namespace nvnmr::detail {

namespace {

constexpr double kPenalty = 1e150;

void evaluate(const ResidualFn& f, const Eigen::VectorXd& x, Eigen::VectorXd& r) {
  f(x, r);
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i])) r[i] = kPenalty;
  }
}

struct Functor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const ResidualFn* f;
  int n;
  int m;
  double step;
  int* evaluations;

  int inputs() const { return n; }
  int values() const { return m; }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    ++*evaluations;
    evaluate(*f, x, r);
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    *evaluations += 2 * n;
    jac = numerical_jacobian(*f, m, x, step);
    return 0;
  }
};

}  // namespace

Eigen::MatrixXd numerical_jacobian(const ResidualFn& f, int m, const Eigen::VectorXd& x, double step) {
  const auto n = x.size();
  Eigen::MatrixXd jac(m, n);
  Eigen::VectorXd xp = x;
  Eigen::VectorXd rp(m);
  Eigen::VectorXd rm(m);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    evaluate(f, xp, rp);
    xp[j] = x[j] - h;
    evaluate(f, xp, rm);
    xp[j] = x[j];
    jac.col(j) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& f, int m, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& opts) {
  LeastSquaresResult out;
  Functor functor{&f, static_cast<int>(x0.size()), m, opts.step, &out.evaluations};
  Eigen::LevenbergMarquardt<Functor> lm(functor);
  lm.parameters.maxfev = opts.max_evaluations;
  lm.parameters.ftol = opts.ftol;
  lm.parameters.xtol = opts.xtol;
  Eigen::VectorXd x = x0;
  const auto status = lm.minimize(x);
  out.x = x;
  out.status = static_cast<int>(status);
  Eigen::VectorXd r(m);
  evaluate(f, x, r);
  out.cost = r.squaredNorm();
  using namespace Eigen::LevenbergMarquardtSpace;
  out.converged = std::isfinite(out.cost) && out.cost < kPenalty &&
                  (status == RelativeReductionTooSmall || status == RelativeErrorTooSmall ||
                   status == RelativeErrorAndReductionTooSmall || status == CosinusTooSmall ||
                   status == FtolTooSmall || status == XtolTooSmall || status == GtolTooSmall);
  return out;
}

}  // namespace nvnmr::detail
