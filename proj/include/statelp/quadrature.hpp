#pragma once

#include <Eigen/Dense>
#include <functional>

namespace statelp {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Simpson integration of f over [lo, hi] to absolute tolerance tol.
/// Throws QuadratureError if the recursion depth limit is exhausted before the
/// tolerance is met.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  double tol = 1e-8, int max_depth = 50);

/// Trapezoid rule on an ordered grid.
double trapezoid(const Eigen::Ref<const Eigen::VectorXd>& grid,
                 const Eigen::Ref<const Eigen::VectorXd>& values);

/// n equally spaced points from lo to hi inclusive.
Eigen::VectorXd linspace(double lo, double hi, int n);

}  // namespace statelp
