#include "statelp/basis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "statelp/errors.hpp"

namespace statelp {

namespace {

constexpr int kDegree = 3;

long count_distinct(const Eigen::Ref<const Eigen::VectorXd>& sorted, long cap) {
  long distinct = sorted.size() > 0 ? 1 : 0;
  for (Eigen::Index i = 1; i < sorted.size() && distinct < cap; ++i)
    if (sorted[i] != sorted[i - 1]) ++distinct;
  return distinct;
}

}  // namespace

double quantile_sorted(const Eigen::Ref<const Eigen::VectorXd>& sorted, double level) {
  const Eigen::Index m = sorted.size();
  if (m == 0) throw BasisError("quantile of empty sample");
  if (m == 1) return sorted[0];
  const double h = (static_cast<double>(m) - 1.0) * level;
  const auto lo = static_cast<Eigen::Index>(std::floor(h));
  if (lo >= m - 1) return sorted[m - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BasisSpec make_basis_sorted(const Eigen::Ref<const Eigen::VectorXd>& sorted_z, int j) {
  if (j < 4) throw BasisError("basis dimension must be at least 4, got " + std::to_string(j));
  if (sorted_z.size() == 0) throw BasisError("empty state sample");
  if (count_distinct(sorted_z, j) < j)
    throw BasisError("state sample has fewer than " + std::to_string(j) + " distinct values");

  const double lo = sorted_z[0];
  const double hi = sorted_z[sorted_z.size() - 1];

  // Interior knots at quantile levels k/(J-3), k = 1..J-4; drop levels that
  // collide with each other or fall on a boundary, shrinking J to match.
  std::vector<double> interior;
  const int n_interior = j - 4;
  for (int k = 1; k <= n_interior; ++k) {
    const double q = quantile_sorted(sorted_z, static_cast<double>(k) / (n_interior + 1));
    if (q <= lo || q >= hi) continue;
    if (!interior.empty() && q == interior.back()) continue;
    interior.push_back(q);
  }

  BasisSpec spec;
  spec.requested_dimension = j;
  spec.dimension = 4 + static_cast<int>(interior.size());
  spec.lo = lo;
  spec.hi = hi;
  spec.interior_knots = Eigen::Map<Eigen::VectorXd>(interior.data(), interior.size());
  spec.knots.resize(spec.dimension + kDegree + 1);
  for (int i = 0; i <= kDegree; ++i) spec.knots[i] = lo;
  for (size_t i = 0; i < interior.size(); ++i) spec.knots[kDegree + 1 + i] = interior[i];
  for (int i = 0; i <= kDegree; ++i) spec.knots[spec.dimension + i] = hi;
  return spec;
}

BasisSpec make_basis(const Eigen::Ref<const Eigen::VectorXd>& z_sample, int j) {
  Eigen::VectorXd sorted = z_sample;
  for (Eigen::Index i = 0; i < sorted.size(); ++i)
    if (!std::isfinite(sorted[i])) throw BasisError("non-finite state value in basis sample");
  std::sort(sorted.data(), sorted.data() + sorted.size());
  return make_basis_sorted(sorted, j);
}

void eval_basis_row(const BasisSpec& spec, double z, double* out) {
  if (std::isnan(z)) throw BasisError("NaN passed to basis evaluation");
  const int j = spec.dimension;
  std::fill(out, out + j, 0.0);
  z = std::min(std::max(z, spec.lo), spec.hi);

  // Knot span index k with t_k <= z < t_{k+1}, last span closed at hi.
  const Eigen::VectorXd& t = spec.knots;
  int k = kDegree;
  const int last_span = j - 1;
  while (k < last_span && z >= t[k + 1]) ++k;

  // Cox-de Boor recursion over the 4 local functions.
  double values[kDegree + 1];
  double left[kDegree + 1];
  double right[kDegree + 1];
  values[0] = 1.0;
  for (int d = 1; d <= kDegree; ++d) {
    left[d] = z - t[k + 1 - d];
    right[d] = t[k + d] - z;
    double saved = 0.0;
    for (int r = 0; r < d; ++r) {
      const double denom = right[r + 1] + left[d - r];
      const double temp = denom != 0.0 ? values[r] / denom : 0.0;
      values[r] = saved + right[r + 1] * temp;
      saved = left[d - r] * temp;
    }
    values[d] = saved;
  }
  for (int r = 0; r <= kDegree; ++r) out[k - kDegree + r] = values[r];
}

Eigen::MatrixXd eval_basis(const BasisSpec& spec,
                           const Eigen::Ref<const Eigen::VectorXd>& points) {
  Eigen::MatrixXd values(points.size(), spec.dimension);
  Eigen::VectorXd row(spec.dimension);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    eval_basis_row(spec, points[i], row.data());
    values.row(i) = row;
  }
  return values;
}

}  // namespace statelp
