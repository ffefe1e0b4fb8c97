#pragma once

#include <Eigen/Dense>

namespace statelp {

/// Cubic B-spline basis on [lo, hi] with interior knots at equally spaced
/// empirical quantiles of the fitting sample. dimension == 4 + #interior
/// knots; dimension 4 spans the global cubic polynomials. Constants lie in
/// the span (partition of unity), so no separate intercept column is ever
/// appended to the interaction block.
struct BasisSpec {
  int dimension = 0;            // J
  int requested_dimension = 0;  // J asked for; smaller than dimension never, larger when
                                // tied quantiles were deduplicated
  double lo = 0.0;
  double hi = 0.0;
  Eigen::VectorXd interior_knots;  // strictly inside (lo, hi), nondecreasing
  Eigen::VectorXd knots;           // clamped knot vector, size dimension + 4
};

/// Build the basis from the fitting sample of states. Interior knots sit at
/// type-7 empirical quantiles k/(J-3), k = 1..J-4; duplicates are removed and
/// the dimension reduced accordingly (requested_dimension records the ask).
BasisSpec make_basis(const Eigen::Ref<const Eigen::VectorXd>& z_sample, int j);

/// Same, but the sample is already sorted ascending (avoids re-sorting in
/// selection loops).
BasisSpec make_basis_sorted(const Eigen::Ref<const Eigen::VectorXd>& sorted_z, int j);

/// Evaluate all J basis functions at z. Points outside [lo, hi] are clamped to
/// the nearest boundary knot. `out` must hold spec.dimension entries; at most
/// 4 of them are nonzero.
void eval_basis_row(const BasisSpec& spec, double z, double* out);

/// n x J matrix of basis values at the given points (clamped at the edges).
Eigen::MatrixXd eval_basis(const BasisSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& points);

/// Type-7 quantile (linear interpolation of order statistics) of sorted data.
double quantile_sorted(const Eigen::Ref<const Eigen::VectorXd>& sorted, double level);

}  // namespace statelp
