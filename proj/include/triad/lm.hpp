#pragma once

// Levenberg-Marquardt with central-difference numeric Jacobians and box
// bounds enforced by clamping. Meant for the handful of parameters the
// calibration fitters hand it; callers scale them to O(1) first.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "triad/errors.hpp"

namespace triad::lm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ResidualFn = std::function<Vec(const Vec&)>;

struct Options {
  int max_iterations = 500;
  double ftol = 1e-10;  // relative objective change
  double gtol = 1e-8;   // infinity norm of J^T r
  double lambda0 = 1e-3;
  double diff_step = 1e-6;
};

struct Result {
  Vec x;
  double cost = 0.0;  // sum of squared residuals
  int iterations = 0;
  bool converged = false;
  Mat jacobian;
  Vec residuals;
  std::vector<double> cost_history;  // cost after every accepted step
};

inline Mat numeric_jacobian(const ResidualFn& f, const Vec& x, Eigen::Index m, const Vec& lo,
                            const Vec& hi, double step) {
  Mat J(m, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(x[j]));
    Vec xp = x, xm = x;
    xp[j] = std::min(x[j] + h, hi[j]);
    xm[j] = std::max(x[j] - h, lo[j]);
    const double span = xp[j] - xm[j];
    if (span == 0.0) {
      J.col(j).setZero();
      continue;
    }
    J.col(j) = (f(xp) - f(xm)) / span;
  }
  return J;
}

inline Result minimize(const ResidualFn& f, Vec x0, Vec lo, Vec hi, const Options& opt = {}) {
  const Eigen::Index n = x0.size();
  if (lo.size() == 0) lo = Vec::Constant(n, -std::numeric_limits<double>::infinity());
  if (hi.size() == 0) hi = Vec::Constant(n, std::numeric_limits<double>::infinity());
  detail::require(lo.size() == n && hi.size() == n, "lm: bound dimension mismatch");
  Vec x = x0.cwiseMax(lo).cwiseMin(hi);

  Result res;
  Vec r = f(x);
  detail::require(r.size() >= n, "lm: fewer residuals than parameters");
  double cost = r.squaredNorm();
  if (!std::isfinite(cost)) throw ConvergenceError("lm: objective not finite at the initial point");
  res.cost_history.push_back(cost);
  double lambda = opt.lambda0;

  Mat J = numeric_jacobian(f, x, r.size(), lo, hi, opt.diff_step);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    const Vec g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < opt.gtol) {
      res.converged = true;
      break;
    }
    const Mat A = J.transpose() * J;
    const Vec diag = A.diagonal().cwiseMax(1e-12 * std::max(1.0, A.diagonal().maxCoeff()));

    bool accepted = false;
    double new_cost = cost;
    Vec x_new = x, r_new = r;
    for (int tries = 0; tries < 30; ++tries) {
      Mat M = A;
      M.diagonal() += lambda * diag;
      const Vec step = M.ldlt().solve(-g);
      x_new = (x + step).cwiseMax(lo).cwiseMin(hi);
      r_new = f(x_new);
      new_cost = r_new.squaredNorm();
      if (std::isfinite(new_cost) && new_cost < cost) {
        accepted = true;
        lambda = std::max(lambda / 3.0, 1e-12);
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e16) break;
    }
    if (!accepted) {
      // No descent direction left at machine precision: a minimum.
      res.converged = true;
      break;
    }
    const double rel = (cost - new_cost) / std::max(cost, std::numeric_limits<double>::min());
    x = x_new;
    r = r_new;
    cost = new_cost;
    res.cost_history.push_back(cost);
    J = numeric_jacobian(f, x, r.size(), lo, hi, opt.diff_step);
    if (rel < opt.ftol || cost == 0.0) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  res.cost = cost;
  res.residuals = r;
  res.jacobian = J;
  return res;
}

/// s^2 (J^T J)^-1 with s^2 = cost / (m - n); zero-dof fits get an infinite
/// variance.
inline Mat covariance(const Result& r) {
  const Eigen::Index m = r.residuals.size(), n = r.x.size();
  const Mat A = r.jacobian.transpose() * r.jacobian;
  if (m <= n) return Mat::Constant(n, n, std::numeric_limits<double>::infinity());
  const double s2 = r.cost / static_cast<double>(m - n);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
  return s2 * cod.pseudoInverse();
}

}  // namespace triad::lm
