#include "statelp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "statelp/errors.hpp"
#include "statelp/estimator.hpp"

namespace statelp {

std::string selector_name(Selector s) {
  switch (s) {
    case Selector::Aic: return "aic";
    case Selector::Gcv: return "gcv";
    case Selector::Lasso: return "lasso";
    case Selector::Oracle: return "oracle";
  }
  return "?";
}

Selector parse_selector(const std::string& name) {
  if (name == "aic") return Selector::Aic;
  if (name == "gcv") return Selector::Gcv;
  if (name == "lasso") return Selector::Lasso;
  if (name == "oracle") return Selector::Oracle;
  throw ConfigError("unknown selector '" + name + "'");
}

std::vector<int> default_candidates() {
  std::vector<int> c;
  for (int j = 4; j <= 20; ++j) c.push_back(j);
  return c;
}

namespace {

enum class Criterion { Aic, Gcv };

SelectionResult select_by_criterion(const RegressionSample& sample,
                                    const std::vector<int>& candidates, bool with_intermediate,
                                    Criterion crit) {
  if (candidates.empty()) throw ConfigError("empty candidate set");
  auto shared = std::make_shared<const RegressionSample>(sample);
  Eigen::VectorXd sorted_state = sample.state_at_base;
  std::sort(sorted_state.data(), sorted_state.data() + sorted_state.size());

  SelectionResult result;
  result.selector = crit == Criterion::Aic ? Selector::Aic : Selector::Gcv;
  double best = std::numeric_limits<double>::infinity();
  int best_j = -1;
  for (int j : candidates) {
    CandidateTrace trace;
    trace.requested_j = j;
    try {
      const BasisSpec basis = make_basis_sorted(sorted_state, j);
      trace.effective_j = basis.dimension;
      const DesignMatrix design = build_design(shared, basis, with_intermediate);
      const long k = design.cols();
      const long n = design.rows();
      trace.k_params = k;
      if (crit == Criterion::Gcv && k >= n) throw RankError("K_J >= n");
      const LpFit fit = fit_ols(design);
      trace.ssr = fit.residuals.squaredNorm();
      const double mean_ssr = std::max(trace.ssr / static_cast<double>(n), 1e-300);
      trace.criterion = crit == Criterion::Aic
                            ? static_cast<double>(n) * std::log(mean_ssr) + 2.0 * k
                            : trace.ssr / (n * std::pow(1.0 - static_cast<double>(k) / n, 2));
      if (trace.criterion < best) {
        best = trace.criterion;
        best_j = j;
      }
    } catch (const NumericError& e) {
      trace.skipped = true;
      trace.skip_reason = e.what();
    } catch (const BasisError& e) {
      trace.skipped = true;
      trace.skip_reason = e.what();
    }
    result.trace.push_back(std::move(trace));
  }
  if (best_j < 0) throw SelectionError("every candidate dimension was skipped");
  result.j_hat = best_j;
  return result;
}

double soft_threshold(double v, double lambda) {
  if (v > lambda) return v - lambda;
  if (v < -lambda) return v + lambda;
  return 0.0;
}

// Cyclic coordinate descent on the standardized Gram system. Returns the
// sweep count; throws ConvergenceError past the sweep budget.
int coordinate_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& cross, double lambda,
                       Eigen::VectorXd& theta, double tol = 1e-7, int max_sweeps = 100000) {
  const int p = static_cast<int>(theta.size());
  Eigen::VectorXd rho = gram * theta;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int j = 0; j < p; ++j) {
      const double gjj = gram(j, j);
      if (gjj <= 0.0) {
        theta[j] = 0.0;
        continue;
      }
      const double r = cross[j] - rho[j] + gjj * theta[j];
      const double updated = soft_threshold(r, lambda) / gjj;
      const double change = updated - theta[j];
      if (change != 0.0) {
        rho += gram.col(j) * change;
        theta[j] = updated;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    if (max_change <= tol) return sweep;
  }
  throw ConvergenceError("coordinate descent did not converge within the sweep budget");
}

}  // namespace

SelectionResult select_aic(const RegressionSample& sample, const std::vector<int>& candidates,
                           bool with_intermediate) {
  return select_by_criterion(sample, candidates, with_intermediate, Criterion::Aic);
}

SelectionResult select_gcv(const RegressionSample& sample, const std::vector<int>& candidates,
                           bool with_intermediate) {
  return select_by_criterion(sample, candidates, with_intermediate, Criterion::Gcv);
}

SelectionResult select_oracle(int j_fixed) {
  if (j_fixed < 4) throw ConfigError("oracle dimension must be at least 4");
  SelectionResult result;
  result.selector = Selector::Oracle;
  result.j_hat = j_fixed;
  CandidateTrace trace;
  trace.requested_j = j_fixed;
  trace.effective_j = j_fixed;
  result.trace.push_back(trace);
  return result;
}

LassoSolution lasso_solve(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y, double lambda) {
  const int p = static_cast<int>(x.cols());
  const double n = static_cast<double>(x.rows());
  Eigen::MatrixXd gram = (x.transpose() * x) / n;
  Eigen::VectorXd cross = (x.transpose() * y) / n;
  Eigen::VectorXd scale(p);
  for (int j = 0; j < p; ++j) scale[j] = gram(j, j) > 0.0 ? std::sqrt(gram(j, j)) : 1.0;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) gram(a, b) /= scale[a] * scale[b];
  cross.array() /= scale.array();

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  LassoSolution sol;
  sol.sweeps = coordinate_descent(gram, cross, lambda, theta);
  sol.coef = theta.array() / scale.array();
  return sol;
}

SelectionResult select_lasso(const RegressionSample& sample, int j_lasso, const CvSpec& cv,
                             bool with_intermediate) {
  if (j_lasso < 4) throw ConfigError("maximal lasso dimension must be at least 4");
  const int folds = std::max(cv.folds, 2);
  auto shared = std::make_shared<const RegressionSample>(sample);
  const BasisSpec basis = make_basis(sample.state_at_base, j_lasso);
  const DesignMatrix design = build_design(shared, basis, with_intermediate);
  const int p = design.cols();
  const long n = design.rows();
  const int n_units = design.n_units;
  const int n_times = design.n_times;
  if (n_times < folds) throw SelectionError("fewer base times than cross-validation folds");

  // Per-fold raw moments over contiguous time blocks (rows are time-major).
  std::vector<Eigen::MatrixXd> gram_fold(folds);
  std::vector<Eigen::VectorXd> cross_fold(folds);
  std::vector<double> yy_fold(folds, 0.0);
  std::vector<long> rows_fold(folds, 0);
  Eigen::MatrixXd gram_full = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd cross_full = Eigen::VectorXd::Zero(p);
  for (int f = 0; f < folds; ++f) {
    const long t0 = static_cast<long>(f) * n_times / folds;
    const long t1 = static_cast<long>(f + 1) * n_times / folds;
    const long r0 = t0 * n_units;
    const long len = (t1 - t0) * n_units;
    rows_fold[f] = len;
    const auto xb = design.columns.middleRows(r0, len);
    const auto yb = design.response.segment(r0, len);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);
    g.selfadjointView<Eigen::Lower>().rankUpdate(xb.transpose());
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    gram_fold[f] = g;
    cross_fold[f] = xb.transpose() * yb;
    yy_fold[f] = yb.squaredNorm();
    gram_full += g;
    cross_full += cross_fold[f];
  }

  Eigen::VectorXd scale(p);
  for (int j = 0; j < p; ++j) {
    const double ms = gram_full(j, j) / static_cast<double>(n);
    scale[j] = ms > 0.0 ? std::sqrt(ms) : 1.0;
  }
  const auto standardize = [&](const Eigen::MatrixXd& g, const Eigen::VectorXd& c, long rows,
                               Eigen::MatrixXd& gs, Eigen::VectorXd& cs) {
    gs = g / static_cast<double>(rows);
    cs = c / static_cast<double>(rows);
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) gs(a, b) /= scale[a] * scale[b];
    cs.array() /= scale.array();
  };

  Eigen::MatrixXd gs_full;
  Eigen::VectorXd cs_full;
  standardize(gram_full, cross_full, n, gs_full, cs_full);

  constexpr int kGridSize = 50;
  constexpr double kGridRatio = 1e-3;
  const double lambda_max = cs_full.lpNorm<Eigen::Infinity>();
  if (lambda_max <= 0.0) throw DegenerateError("response is orthogonal to every regressor");
  Eigen::VectorXd lambdas(kGridSize);
  for (int i = 0; i < kGridSize; ++i)
    lambdas[i] = lambda_max * std::pow(kGridRatio, static_cast<double>(i) / (kGridSize - 1));

  // Cross-validation: warm-started descent along the path within each fold.
  Eigen::VectorXd cv_loss = Eigen::VectorXd::Zero(kGridSize);
  for (int f = 0; f < folds; ++f) {
    Eigen::MatrixXd gs_train;
    Eigen::VectorXd cs_train;
    standardize(gram_full - gram_fold[f], cross_full - cross_fold[f], n - rows_fold[f], gs_train,
                cs_train);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    for (int i = 0; i < kGridSize; ++i) {
      coordinate_descent(gs_train, cs_train, lambdas[i], theta);
      const Eigen::VectorXd coef = theta.array() / scale.array();
      const double sse = yy_fold[f] - 2.0 * coef.dot(cross_fold[f]) +
                         coef.dot(gram_fold[f].selfadjointView<Eigen::Lower>() * coef);
      cv_loss[i] += std::max(sse, 0.0);
    }
  }
  cv_loss /= static_cast<double>(folds);

  int best = 0;
  for (int i = 1; i < kGridSize; ++i)
    if (cv_loss[i] < cv_loss[best]) best = i;

  // Full-data path for the trace and the selected coefficient support.
  LassoTrace trace;
  trace.lambda_grid = lambdas;
  trace.cv_loss = cv_loss;
  trace.lambda_hat = lambdas[best];
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd theta_hat;
  for (int i = 0; i < kGridSize; ++i) {
    coordinate_descent(gs_full, cs_full, lambdas[i], theta);
    int nonzero = 0;
    for (int j = 0; j < basis.dimension; ++j)
      if (theta[j] != 0.0) ++nonzero;
    trace.nonzero_counts.push_back(nonzero);
    if (i == best) theta_hat = theta;
  }
  trace.nonzero_at_hat = trace.nonzero_counts[best];

  SelectionResult result;
  result.selector = Selector::Lasso;
  result.j_hat = std::max(trace.nonzero_at_hat, 4);
  result.lasso = std::move(trace);
  return result;
}

}  // namespace statelp
