#include "statelp/misspec.hpp"

#include <algorithm>
#include <cmath>

#include "statelp/errors.hpp"
#include "statelp/rng.hpp"

namespace statelp {

WeightCurve omega_empirical(const Eigen::Ref<const Eigen::VectorXd>& z,
                            const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& z_grid) {
  const Eigen::Index n = z.size();
  if (n != x.size()) throw InputError("state and shock samples differ in length");
  if (n < 2) throw InputError("need at least two observations");

  const double z_mean = z.mean();
  if ((z.array() - z_mean).square().mean() <= 0.0)
    throw DegenerateError("state has zero variance in the sample");
  const Eigen::ArrayXd zx = z.array() * x.array();
  const double zx_mean = zx.mean();
  const double zx_var = (zx - zx_mean).square().mean();
  if (zx_var <= 0.0) throw DegenerateError("Var(Z X) is zero in the sample");

  WeightCurve curve;
  curve.grid = z_grid;
  curve.omega.resize(z_grid.size());
  const double x_mean = x.mean();
  for (Eigen::Index m = 0; m < z_grid.size(); ++m) {
    // Cov( X 1{Z >= z}, Z X ) via plug-in moments.
    double sum_ind_x = 0.0, sum_ind_xzx = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (z[i] >= z_grid[m]) {
        sum_ind_x += x[i];
        sum_ind_xzx += x[i] * zx[i];
      }
    }
    const double mean_ind_x = sum_ind_x / static_cast<double>(n);
    const double mean_ind_xzx = sum_ind_xzx / static_cast<double>(n);
    curve.omega[m] = (mean_ind_xzx - mean_ind_x * zx_mean) / zx_var;
  }
  curve.integral = trapezoid(curve.grid, curve.omega);
  for (Eigen::Index m = 1; m < z_grid.size(); ++m)
    if ((curve.omega[m - 1] < 0.0) != (curve.omega[m] < 0.0))
      curve.sign_changes.push_back(0.5 * (z_grid[m - 1] + z_grid[m]));
  return curve;
}

double omega_analytic_example(double z) {
  if (z < 1.0 || z > 3.0) throw DomainError("weight function defined on [1,3]");
  return (15.0 / 32.0) * (z - 1.0) * (3.0 - z) * (3.0 * z * z - 20.0 * z + 29.0);
}

double gprime_analytic_example(double z) {
  if (z < 1.0 || z > 3.0) throw DomainError("derivative defined on [1,3]");
  return (z - 1.0) * (z - 1.5) * (z - 2.5) * (3.0 - z);
}

QuadratureResult linear_estimand(const std::function<double(double)>& omega,
                                 const std::function<double(double)>& gprime, double lo,
                                 double hi) {
  return adaptive_simpson([&](double z) { return omega(z) * gprime(z); }, lo, hi, 1e-8);
}

double linear_estimand(const WeightCurve& omega, const std::function<double(double)>& gprime) {
  Eigen::VectorXd integrand(omega.grid.size());
  for (Eigen::Index m = 0; m < omega.grid.size(); ++m)
    integrand[m] = omega.omega[m] * gprime(omega.grid[m]);
  return trapezoid(omega.grid, integrand);
}

void sample_example_law(int n, std::uint64_t seed, Eigen::VectorXd& z, Eigen::VectorXd& x) {
  Rng rng(seed);
  z.resize(n);
  x.resize(n);
  for (int i = 0; i < n; ++i) {
    z[i] = 1.0 + 2.0 * rng.uniform();
    x[i] = 4.0 - z[i];
  }
}

}  // namespace statelp
