#include "statelp/estimator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <string>

#include "statelp/errors.hpp"

namespace statelp {

namespace {

// Flop threshold below which the reference pivoted-QR solver is used
// unconditionally; above it the Gram/Cholesky path is tried first.
constexpr double kQrFlopCutoff = 3e7;

std::string list_columns(const std::vector<int>& cols) {
  std::string s;
  for (size_t i = 0; i < cols.size() && i < 8; ++i) {
    if (i) s += ", ";
    s += std::to_string(cols[i]);
  }
  if (cols.size() > 8) s += ", ...";
  return s;
}

struct Solved {
  Eigen::VectorXd theta;
};

Solved solve_qr(const Eigen::MatrixXd& d, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
  qr.setThreshold(1e-10);
  if (qr.rank() < d.cols()) {
    // The permutation puts the dependent columns last.
    std::vector<int> offending;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < d.cols(); ++k) offending.push_back(perm[k]);
    std::sort(offending.begin(), offending.end());
    throw RankError("design is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                    std::to_string(d.cols()) + "), offending columns: " + list_columns(offending));
  }
  return {qr.solve(y)};
}

// Normal-equations path for large well-conditioned problems. The solution is
// verified against the normal equations and falls back to QR if the Cholesky
// factorization fails or the residual check does not hold.
Solved solve_gram(const Eigen::MatrixXd& d, const Eigen::VectorXd& y, const Eigen::MatrixXd& gram,
                  const Eigen::VectorXd& cross) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd theta = llt.solve(cross);
    const double scale = std::max(1.0, cross.lpNorm<Eigen::Infinity>());
    const double resid = (gram.selfadjointView<Eigen::Lower>() * theta - cross)
                             .lpNorm<Eigen::Infinity>();
    if (resid <= 1e-8 * scale) return {std::move(theta)};
  }
  return solve_qr(d, y);
}

}  // namespace

DesignMatrix build_design(std::shared_ptr<const RegressionSample> sample, const BasisSpec& basis,
                          bool with_intermediate) {
  const RegressionSample& s = *sample;
  if (with_intermediate && s.horizon >= 1 && !s.with_intermediate)
    throw DesignError("intermediate blocks requested but the sample carries no future terms");

  const int j = basis.dimension;
  const int h_blocks = (with_intermediate && s.horizon >= 1) ? s.horizon : 0;
  const int q = static_cast<int>(s.controls.cols());
  const long n = s.rows();

  DesignMatrix design;
  design.basis = basis;
  design.n_intermediate_blocks = h_blocks;
  design.n_controls = q;
  design.n_units = s.n_units;
  design.n_times = s.n_times();
  design.sample = std::move(sample);
  design.response = s.response;
  design.columns.resize(n, j + h_blocks * j + q);

  Eigen::VectorXd row(j);
  for (long r = 0; r < n; ++r) {
    eval_basis_row(basis, s.state_at_base[r], row.data());
    design.columns.block(r, 0, 1, j) = s.shock_at_base[r] * row.transpose();
    for (int b = 0; b < h_blocks; ++b) {
      eval_basis_row(basis, s.future_state(r, b), row.data());
      design.columns.block(r, j * (1 + b), 1, j) = s.future_shock(r, b) * row.transpose();
    }
  }
  if (q > 0) design.columns.rightCols(q) = s.controls;
  return design;
}

DesignMatrix build_design(const RegressionSample& sample, const BasisSpec& basis,
                          bool with_intermediate) {
  return build_design(std::make_shared<const RegressionSample>(sample), basis, with_intermediate);
}

LpFit fit_ols(const DesignMatrix& design, LsSolver solver) {
  const Eigen::MatrixXd& d = design.columns;
  const Eigen::VectorXd& y = design.response;
  const long n = design.rows();
  const int p = design.cols();
  const int j = design.sieve_dim();
  if (n <= p)
    throw RankError("sample size " + std::to_string(n) + " does not exceed column count " +
                    std::to_string(p));

  // Second-moment blocks are needed for inference regardless of the solver.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(d.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  Eigen::VectorXd cross = d.transpose() * y;

  Solved sol;
  const double flops = 2.0 * static_cast<double>(n) * p * p;
  if (solver == LsSolver::Qr || (solver == LsSolver::Auto && flops <= kQrFlopCutoff)) {
    sol = solve_qr(d, y);
  } else {
    sol = solve_gram(d, y, gram, cross);
  }

  LpFit fit;
  fit.horizon = design.sample ? design.sample->horizon : 0;
  fit.basis = design.basis;
  fit.sieve_coef = sol.theta.head(j);
  fit.nuisance_coef = sol.theta.tail(p - j);
  fit.residuals = y - d * sol.theta;
  fit.n = n;
  fit.n_units = design.n_units;
  fit.n_times = design.n_times;
  fit.n_intermediate_blocks = design.n_intermediate_blocks;
  fit.n_controls = design.n_controls;
  fit.sample = design.sample;

  const double inv_n = 1.0 / static_cast<double>(n);
  fit.a11 = gram.topLeftCorner(j, j) * inv_n;
  fit.a12 = gram.topRightCorner(j, p - j) * inv_n;
  fit.a22 = gram.bottomRightCorner(p - j, p - j) * inv_n;
  fit.b1 = cross.head(j) * inv_n;
  fit.b2 = cross.tail(p - j) * inv_n;
  if (p > j) {
    Eigen::LLT<Eigen::MatrixXd> llt(fit.a22);
    if (llt.info() != Eigen::Success)
      throw RankError("nuisance second-moment block is singular");
    fit.schur = fit.a11 - fit.a12 * llt.solve(fit.a12.transpose());
  } else {
    fit.schur = fit.a11;
  }
  fit.schur = 0.5 * (fit.schur + fit.schur.transpose()).eval();
  return fit;
}

Eigen::VectorXd schur_b(const LpFit& fit) {
  Eigen::VectorXd rhs = fit.b1;
  if (fit.nuisance_cols() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt22(fit.a22);
    if (llt22.info() != Eigen::Success)
      throw RankError("nuisance second-moment block is singular");
    rhs -= fit.a12 * llt22.solve(fit.b2);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(fit.schur);
  if (llt.info() != Eigen::Success)
    throw RankError("partialled sieve second-moment matrix is singular");
  return llt.solve(rhs);
}

Eigen::VectorXd evaluate_irf(const LpFit& fit, const Eigen::Ref<const Eigen::VectorXd>& grid,
                             double delta) {
  Eigen::VectorXd out(grid.size());
  Eigen::VectorXd row(fit.j());
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    eval_basis_row(fit.basis, grid[m], row.data());
    out[m] = row.dot(fit.sieve_coef) * delta;
  }
  return out;
}

LinearLpFit fit_linear_lp(const RegressionSample& sample) {
  const long n = sample.rows();
  const int q = static_cast<int>(sample.controls.cols());
  Eigen::MatrixXd d(n, 2 + q);
  d.col(0) = sample.shock_at_base;
  d.col(1) = sample.state_at_base.cwiseProduct(sample.shock_at_base);
  if (q > 0) d.rightCols(q) = sample.controls;
  if (n <= d.cols())
    throw RankError("sample size does not exceed column count in linear LP");
  Solved sol = solve_qr(d, sample.response);

  LinearLpFit fit;
  fit.alpha = sol.theta[0];
  fit.beta = sol.theta[1];
  fit.control_coef = sol.theta.tail(q);
  fit.residuals = sample.response - d * sol.theta;
  fit.n = n;
  return fit;
}

}  // namespace statelp
