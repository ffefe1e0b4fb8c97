#include "statelp/inference.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "statelp/errors.hpp"
#include "statelp/rng.hpp"

namespace statelp {

ScoreSeries score_process(const LpFit& fit) {
  if (!fit.sample) throw DesignError("fit carries no sample; cannot rebuild regressors");
  const RegressionSample& s = *fit.sample;
  const int j = fit.j();
  const int k2 = fit.nuisance_cols();
  const int n_units = fit.n_units;
  const int n_times = fit.n_times;

  Eigen::MatrixXd partial;  // a12 a22^{-1}, J x K2
  if (k2 > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(fit.a22);
    if (llt.info() != Eigen::Success)
      throw RankError("nuisance second-moment block is singular");
    partial = llt.solve(fit.a12.transpose()).transpose();
  }

  ScoreSeries series;
  series.scores.resize(n_times, j);
  series.base_times = s.base_times;
  series.n = fit.n;

  Eigen::MatrixXd sieve_rows(n_units, j);
  Eigen::MatrixXd w_rows(n_units, k2);
  Eigen::VectorXd row(j);
  for (int ti = 0; ti < n_times; ++ti) {
    const long offset = static_cast<long>(ti) * n_units;
    for (int i = 0; i < n_units; ++i) {
      const long r = offset + i;
      eval_basis_row(fit.basis, s.state_at_base[r], row.data());
      sieve_rows.row(i) = s.shock_at_base[r] * row.transpose();
      for (int b = 0; b < fit.n_intermediate_blocks; ++b) {
        eval_basis_row(fit.basis, s.future_state(r, b), row.data());
        w_rows.block(i, j * b, 1, j) = s.future_shock(r, b) * row.transpose();
      }
      if (fit.n_controls > 0)
        w_rows.block(i, j * fit.n_intermediate_blocks, 1, fit.n_controls) = s.controls.row(r);
    }
    const auto u = fit.residuals.segment(offset, n_units);
    Eigen::VectorXd score = sieve_rows.transpose() * u;
    if (k2 > 0) score -= partial * (w_rows.transpose() * u);
    series.scores.row(ti) = score.transpose();
  }
  return series;
}

int default_hac_lag(long n) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

HacEstimate bartlett_hac(const ScoreSeries& scores, std::optional<int> lag) {
  const int n_times = static_cast<int>(scores.scores.rows());
  const int j = static_cast<int>(scores.scores.cols());
  const int l = lag.value_or(default_hac_lag(scores.n));
  if (l < 0) throw HacError("negative truncation lag");
  if (l >= n_times)
    throw HacError("truncation lag " + std::to_string(l) + " not below series length " +
                   std::to_string(n_times));

  const double inv_n = 1.0 / static_cast<double>(scores.n);
  HacEstimate hac;
  hac.lag = l;
  hac.weights.resize(l);
  hac.omega = inv_n * (scores.scores.transpose() * scores.scores);  // Gamma(0)
  for (int k = 1; k <= l; ++k) {
    const double w = static_cast<double>(l + 1 - k) / static_cast<double>(l + 1);
    hac.weights[k - 1] = w;
    const auto lead = scores.scores.bottomRows(n_times - k);
    const auto trail = scores.scores.topRows(n_times - k);
    const Eigen::MatrixXd gamma_k = inv_n * (lead.transpose() * trail);
    hac.omega += w * (gamma_k + gamma_k.transpose());
  }
  hac.omega = 0.5 * (hac.omega + hac.omega.transpose()).eval();
  return hac;
}

CoefCovariance coef_covariance(const HacEstimate& hac, const LpFit& fit) {
  Eigen::LLT<Eigen::MatrixXd> llt(fit.schur);
  if (llt.info() != Eigen::Success)
    throw RankError("partialled sieve second-moment matrix is singular");
  const Eigen::MatrixXd inner = llt.solve(hac.omega);
  Eigen::MatrixXd v = llt.solve(inner.transpose()).transpose() / static_cast<double>(fit.n);
  CoefCovariance cov;
  cov.v = 0.5 * (v + v.transpose());
  cov.n = fit.n;
  return cov;
}

namespace {

double quadratic_form_sd(const Eigen::MatrixXd& v, const Eigen::VectorXd& phi) {
  const double var = phi.dot(v * phi);
  if (var < -1e-12)
    throw NumericalError("negative pointwise variance " + std::to_string(var));
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace

Eigen::VectorXd pointwise_sd(const LpFit& fit, const CoefCovariance& cov,
                             const Eigen::Ref<const Eigen::VectorXd>& grid) {
  Eigen::VectorXd out(grid.size());
  Eigen::VectorXd phi(fit.j());
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    eval_basis_row(fit.basis, grid[m], phi.data());
    out[m] = quadratic_form_sd(cov.v, phi);
  }
  return out;
}

PointwiseBand pointwise_ci(const LpFit& fit, const CoefCovariance& cov,
                           const Eigen::Ref<const Eigen::VectorXd>& grid, double alpha,
                           double delta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  const double crit = normal_quantile(1.0 - alpha / 2.0);
  const Eigen::VectorXd est = evaluate_irf(fit, grid, delta);
  const Eigen::VectorXd sd = pointwise_sd(fit, cov, grid);
  PointwiseBand band;
  band.lo = est - crit * std::abs(delta) * sd;
  band.hi = est + crit * std::abs(delta) * sd;
  return band;
}

Interval contrast_ci(const LpFit& fit, const CoefCovariance& cov, double z_a, double z_b,
                     double alpha, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  Eigen::VectorXd phi_a(fit.j()), phi_b(fit.j());
  eval_basis_row(fit.basis, z_a, phi_a.data());
  eval_basis_row(fit.basis, z_b, phi_b.data());
  const Eigen::VectorXd diff = phi_a - phi_b;
  const double center = diff.dot(fit.sieve_coef) * delta;
  const double sd = quadratic_form_sd(cov.v, diff);
  const double half = normal_quantile(1.0 - alpha / 2.0) * sd * std::abs(delta);
  return {center - half, center + half};
}

double sup_band_critical_value(const Eigen::Ref<const Eigen::MatrixXd>& phi_grid,
                               const Eigen::Ref<const Eigen::MatrixXd>& v, int b_draws,
                               double alpha, std::uint64_t seed) {
  if (b_draws < 1) throw ConfigError("bootstrap draw count must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (phi_grid.rows() == 0) throw ConfigError("empty evaluation grid");

  const int j = static_cast<int>(v.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the coefficient covariance failed");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd vhalf =
      es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd m = phi_grid * vhalf;

  std::vector<double> sups(b_draws);
  Eigen::VectorXd xi(j);
  for (int b = 0; b < b_draws; ++b) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(b));
    for (int k = 0; k < j; ++k) xi[k] = rng.normal();
    sups[b] = (m * xi).lpNorm<Eigen::Infinity>();
  }
  std::sort(sups.begin(), sups.end());
  const double target = (1.0 - alpha) * static_cast<double>(b_draws);
  int k = static_cast<int>(std::ceil(target - 1e-9));
  k = std::min(std::max(k, 1), b_draws);
  return sups[k - 1];
}

IrfCurve uniform_band(const LpFit& fit, const CoefCovariance& cov,
                      const Eigen::Ref<const Eigen::VectorXd>& grid, int b_draws, double alpha,
                      double delta, std::uint64_t seed) {
  if (b_draws < 100) throw ConfigError("need at least 100 bootstrap draws");
  IrfCurve curve;
  curve.grid = grid;
  curve.estimate = evaluate_irf(fit, grid, delta);
  curve.pointwise_se = pointwise_sd(fit, cov, grid);
  const double crit = normal_quantile(1.0 - alpha / 2.0) * std::abs(delta);
  curve.ci_lo = curve.estimate - crit * curve.pointwise_se;
  curve.ci_hi = curve.estimate + crit * curve.pointwise_se;
  curve.critical_value =
      sup_band_critical_value(eval_basis(fit.basis, grid), cov.v, b_draws, alpha, seed);
  const double half = curve.critical_value * std::abs(delta);
  curve.band_lo = curve.estimate.array() - half;
  curve.band_hi = curve.estimate.array() + half;
  curve.alpha = alpha;
  curve.delta = delta;
  curve.b_draws = b_draws;
  curve.seed = seed;
  return curve;
}

}  // namespace statelp
