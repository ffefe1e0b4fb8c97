#pragma once

#include <Eigen/Dense>
#include <memory>

#include "statelp/basis.hpp"
#include "statelp/panel.hpp"

namespace statelp {

/// Stacked per-horizon design. Column layout is
///   [ sieve block | intermediate blocks (s = 1..h) | controls ],
/// where the sieve block holds phi_j(Z_{i,t-1}) X_t, each intermediate block
/// phi_j(Z_{i,t+s-1}) X_{t+s} on the same knot set, and controls W_{i,t-1}.
struct DesignMatrix {
  Eigen::MatrixXd columns;
  Eigen::VectorXd response;
  BasisSpec basis;
  int n_intermediate_blocks = 0;
  int n_controls = 0;
  int n_units = 0;
  int n_times = 0;
  std::shared_ptr<const RegressionSample> sample;

  int sieve_dim() const { return basis.dimension; }
  int cols() const { return static_cast<int>(columns.cols()); }
  long rows() const { return columns.rows(); }
};

DesignMatrix build_design(std::shared_ptr<const RegressionSample> sample, const BasisSpec& basis,
                          bool with_intermediate);
DesignMatrix build_design(const RegressionSample& sample, const BasisSpec& basis,
                          bool with_intermediate);

enum class LsSolver {
  Auto,  // QR for small problems, Gram/Cholesky with QR fallback for large ones
  Qr,    // column-pivoted Householder QR, rank-revealing
  Gram,  // normal equations via Cholesky; falls back to QR on trouble
};

/// Per-horizon OLS fit together with the second-moment blocks used downstream:
/// a11/a12/a22 partition (1/n) D'D at the sieve block, schur is
/// a11 - a12 a22^{-1} a21, and b1/b2 partition (1/n) D'y the same way.
/// Intermediate-block columns are grouped with the controls in the partition.
struct LpFit {
  int horizon = 0;
  BasisSpec basis;
  Eigen::VectorXd sieve_coef;     // J
  Eigen::VectorXd nuisance_coef;  // intermediate + control coefficients
  Eigen::VectorXd residuals;      // n
  Eigen::MatrixXd a11, a12, a22;
  Eigen::MatrixXd schur;
  Eigen::VectorXd b1, b2;
  long n = 0;
  int n_units = 0;
  int n_times = 0;
  int n_intermediate_blocks = 0;
  int n_controls = 0;
  std::shared_ptr<const RegressionSample> sample;

  int j() const { return basis.dimension; }
  int nuisance_cols() const { return static_cast<int>(nuisance_coef.size()); }
};

LpFit fit_ols(const DesignMatrix& design, LsSolver solver = LsSolver::Auto);

/// Sieve coefficients recovered through the block-inversion route,
/// schur^{-1} (b1 - a12 a22^{-1} b2). Agrees with fit.sieve_coef up to
/// numerical error; kept as an independent algebraic path.
Eigen::VectorXd schur_b(const LpFit& fit);

/// phi(z)' b * delta on a grid (basis evaluation clamps at the boundary).
Eigen::VectorXd evaluate_irf(const LpFit& fit, const Eigen::Ref<const Eigen::VectorXd>& grid,
                             double delta);

/// The common linear-interaction specification: regressors X_t, Z_{i,t-1} X_t
/// and the controls. Its state slope is a projection object, not an impulse
/// response, unless the true state dependence is linear.
struct LinearLpFit {
  double alpha = 0.0;  // coefficient on X_t
  double beta = 0.0;   // coefficient on Z_{i,t-1} X_t
  Eigen::VectorXd control_coef;
  Eigen::VectorXd residuals;
  long n = 0;

  double irf(double z, double delta) const { return (alpha + beta * z) * delta; }
};

LinearLpFit fit_linear_lp(const RegressionSample& sample);

}  // namespace statelp
