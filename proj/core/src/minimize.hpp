#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>

namespace rblkit::detail {

struct MinimizeResult {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Quasi-Newton (BFGS) descent with Armijo backtracking over R^3.
/// fn(x) returns {value, gradient}. Stops when ||grad|| <= tol, after max_iters
/// accepted steps, or when no descent step can be found even along -grad.
template <class Fn>
MinimizeResult minimize_bfgs(Fn&& fn, Eigen::Vector3d x, double tol, int max_iters) {
  auto [f, g] = fn(x);
  Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
  bool steepest = true;
  int it = 0;
  while (it < max_iters && g.norm() > tol) {
    Eigen::Vector3d d = -h * g;
    if (!steepest && g.dot(d) >= 0.0) {
      h.setIdentity();
      steepest = true;
      d = -g;
    }
    double step = steepest ? std::min(1.0, 1.0 / g.norm()) : 1.0;
    const double slope = g.dot(d);
    bool accepted = false;
    Eigen::Vector3d xn;
    double fn_val = 0.0;
    Eigen::Vector3d gn;
    for (int ls = 0; ls < 80; ++ls) {
      xn = x + step * d;
      std::tie(fn_val, gn) = fn(xn);
      if (std::isfinite(fn_val)) {
        if (fn_val <= f + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        // Flat to rounding: accept when the gradient still shrinks.
        if (std::abs(fn_val - f) <= 1e-14 * std::max(1.0, std::abs(f)) && gn.norm() < g.norm()) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (steepest) break;
      h.setIdentity();
      steepest = true;
      continue;
    }
    const Eigen::Vector3d s = xn - x;
    const Eigen::Vector3d y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (steepest) h = (sy / y.squaredNorm()) * Eigen::Matrix3d::Identity();
      const double rho = 1.0 / sy;
      const Eigen::Matrix3d v = Eigen::Matrix3d::Identity() - rho * s * y.transpose();
      h = v * h * v.transpose() + rho * s * s.transpose();
      steepest = false;
    }
    x = xn;
    f = fn_val;
    g = gn;
    ++it;
  }
  return {x, f, g.norm(), it, g.norm() <= tol};
}

}  // namespace rblkit::detail
