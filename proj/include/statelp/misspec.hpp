#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "statelp/quadrature.hpp"

namespace statelp {

/// The linear-interaction slope equals the weighted average derivative
/// integral of omega(z) g'(z); omega integrates to one but can change sign,
/// which is what breaks the causal reading of the slope.
struct WeightCurve {
  Eigen::VectorXd grid;
  Eigen::VectorXd omega;
  double integral = 0.0;               // trapezoid over the grid
  std::vector<double> sign_changes;    // grid locations where omega crosses zero
};

/// Plug-in weight curve from pooled observations of (Z_{i,t-1}, X_t):
/// omega(z) = Cov(X 1{Z >= z}, Z X) / Var(Z X).
WeightCurve omega_empirical(const Eigen::Ref<const Eigen::VectorXd>& z,
                            const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& z_grid);

/// Closed-form weight function of the worked example on [1,3]:
/// (15/32)(z-1)(3-z)(3z^2 - 20z + 29).
double omega_analytic_example(double z);

/// Derivative of the worked example's response function:
/// (z-1)(z-1.5)(z-2.5)(3-z) on [1,3].
double gprime_analytic_example(double z);

/// beta = integral of omega(z) g'(z) over [lo, hi], adaptive Simpson.
QuadratureResult linear_estimand(const std::function<double(double)>& omega,
                                 const std::function<double(double)>& gprime, double lo,
                                 double hi);

/// Trapezoid version for an empirical weight curve.
double linear_estimand(const WeightCurve& omega, const std::function<double(double)>& gprime);

/// Draw from the worked example's law: Z ~ U[1,3], X = 4 - Z. A deterministic
/// device for the weight-function algebra; never feed it to inference.
void sample_example_law(int n, std::uint64_t seed, Eigen::VectorXd& z, Eigen::VectorXd& x);

}  // namespace statelp
