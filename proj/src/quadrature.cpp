#include "statelp/quadrature.hpp"

#include <cmath>

#include "statelp/errors.hpp"

namespace statelp {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double m, double fm,
               double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// Classic adaptive Simpson with Richardson correction; accumulates the local
// error estimates into `err`.
double adapt(const std::function<double(double)>& f, double a, double fa, double m, double fm,
             double b, double fb, double whole, double tol, int depth, double& err) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, lm, flm, m, fm);
  const double right = simpson(f, m, fm, rm, frm, b, fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol) {
    err += std::abs(diff) / 15.0;
    return left + right + diff / 15.0;
  }
  if (depth <= 0) throw QuadratureError("adaptive Simpson: depth limit reached before tolerance");
  return adapt(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, err) +
         adapt(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, err);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  double tol, int max_depth) {
  if (!(hi > lo)) {
    if (hi == lo) return {0.0, 0.0};
    throw QuadratureError("adaptive Simpson: empty interval");
  }
  const double m = 0.5 * (lo + hi);
  const double fa = f(lo), fm = f(m), fb = f(hi);
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
    throw QuadratureError("adaptive Simpson: non-finite integrand");
  const double whole = simpson(f, lo, fa, m, fm, hi, fb);
  QuadratureResult result;
  result.value = adapt(f, lo, fa, m, fm, hi, fb, whole, tol, max_depth, result.error_estimate);
  return result;
}

double trapezoid(const Eigen::Ref<const Eigen::VectorXd>& grid,
                 const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (grid.size() != values.size()) throw MetricError("trapezoid: grid/value size mismatch");
  if (grid.size() < 2) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    acc += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return acc;
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
  if (n <= 0) return Eigen::VectorXd();
  if (n == 1) return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

}  // namespace statelp
