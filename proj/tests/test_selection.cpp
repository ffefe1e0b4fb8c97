#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "statelp/errors.hpp"
#include "statelp/estimator.hpp"
#include "statelp/montecarlo.hpp"
#include "statelp/pipeline.hpp"
#include "statelp/rng.hpp"
#include "statelp/selection.hpp"

using namespace statelp;

namespace {

RegressionSample cubic_sample(int n_units, int n_periods, std::uint64_t seed, int horizon = 0,
                              bool intermediate = false) {
  DgpSpec spec;
  const PanelDataset panel =
      with_lagged_outcome_control(simulate_dgp(spec, n_units, n_periods, seed));
  return build_regression_sample(panel, horizon, OutcomeMode::Level, intermediate);
}

}  // namespace

TEST_CASE("singleton candidate set is returned as-is") {
  const RegressionSample s = cubic_sample(50, 40, 1);
  const SelectionResult aic = select_aic(s, {4}, false);
  CHECK(aic.j_hat == 4);
  const SelectionResult gcv = select_gcv(s, {4}, false);
  CHECK(gcv.j_hat == 4);
}

TEST_CASE("AIC criterion matches an external recomputation from the trace") {
  const RegressionSample s = cubic_sample(60, 60, 2);
  const SelectionResult sel = select_aic(s, {4, 6, 8, 10}, false);
  const double n = static_cast<double>(s.rows());
  double best = std::numeric_limits<double>::infinity();
  int best_j = 0;
  for (const auto& c : sel.trace) {
    REQUIRE_FALSE(c.skipped);
    const double recomputed = n * std::log(c.ssr / n) + 2.0 * c.k_params;
    CHECK(c.criterion == doctest::Approx(recomputed).epsilon(1e-12));
    if (recomputed < best) {
      best = recomputed;
      best_j = c.requested_j;
    }
  }
  CHECK(sel.j_hat == best_j);
}

TEST_CASE("AIC picks the smallest dimension containing a cubic truth") {
  // AIC over-selects a nested candidate with probability P(chi2_m > 2m), so
  // the minimal dimension wins roughly 3 times out of 4 here, not almost
  // surely; the Monte Carlo frequency with these seeds is 39/50.
  int picked_4 = 0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    const RegressionSample s = cubic_sample(200, 100, 900 + seed);
    const SelectionResult sel = select_aic(s, {4, 5, 6, 7, 8}, false);
    if (sel.j_hat == 4) ++picked_4;
  }
  CHECK(picked_4 >= 35);
}

TEST_CASE("K_J counts intermediate-block parameters") {
  const RegressionSample s = cubic_sample(40, 60, 3, 4, true);
  const SelectionResult sel = select_aic(s, {4, 5}, true);
  REQUIRE(sel.trace.size() == 2);
  CHECK(sel.trace[0].k_params == 4 * (1 + 4) + 1);
  CHECK(sel.trace[1].k_params == 5 * (1 + 4) + 1);
}

TEST_CASE("GCV agrees with AIC ranking in large samples") {
  const RegressionSample s = cubic_sample(300, 120, 4);
  const std::vector<int> candidates{4, 5, 6, 7, 8, 9, 10};
  const SelectionResult aic = select_aic(s, candidates, false);
  const SelectionResult gcv = select_gcv(s, candidates, false);
  CHECK(aic.j_hat == gcv.j_hat);
}

TEST_CASE("GCV skips candidates with K_J >= n") {
  // 2 units x 6 base times = 12 rows; J=11 plus one control reaches K=12=n.
  const RegressionSample s = cubic_sample(2, 7, 5);
  REQUIRE(s.rows() == 12);
  const SelectionResult sel = select_gcv(s, {4, 11}, false);
  REQUIRE(sel.trace.size() == 2);
  CHECK_FALSE(sel.trace[0].skipped);
  CHECK(sel.trace[1].skipped);
  CHECK(sel.j_hat == 4);
}

TEST_CASE("selection is deterministic") {
  const RegressionSample s = cubic_sample(80, 50, 6);
  const SelectionResult a = select_aic(s, default_candidates(), false);
  const SelectionResult b = select_aic(s, default_candidates(), false);
  CHECK(a.j_hat == b.j_hat);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i)
    CHECK(a.trace[i].criterion == b.trace[i].criterion);
}

TEST_CASE("every candidate skipped raises SelectionError") {
  RegressionSample s = cubic_sample(30, 30, 7);
  s.shock_at_base.setZero();  // sieve block identically zero
  CHECK_THROWS_AS(select_aic(s, {4, 5}, false), SelectionError);
}

TEST_CASE("oracle selector") {
  CHECK(select_oracle(4).j_hat == 4);
  CHECK(select_oracle(10).j_hat == 10);
  CHECK_THROWS_AS(select_oracle(3), ConfigError);
}

TEST_CASE("lasso at lambda = 0 keeps every coefficient, full shrinkage drops all") {
  Rng rng(8);
  const int n = 120, p = 8;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    y[i] = x(i, 0) - 0.5 * x(i, 3) + 0.1 * rng.normal();
  }
  const LassoSolution free = lasso_solve(x, y, 0.0);
  CHECK((free.coef.array() != 0.0).all());
  // Unpenalized coordinate descent solves OLS.
  const Eigen::VectorXd ols = x.colPivHouseholderQr().solve(y);
  CHECK((free.coef - ols).lpNorm<Eigen::Infinity>() <= 1e-5);
  const LassoSolution dead = lasso_solve(x, y, 1e6);
  CHECK(dead.coef.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("lasso solution satisfies the KKT conditions") {
  Rng rng(9);
  const int n = 150, p = 20;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    y[i] = 2.0 * x(i, 1) - 1.0 * x(i, 5) + 0.4 * x(i, 11) + 0.2 * rng.normal();
  }
  const double lambda = 0.05;
  const LassoSolution sol = lasso_solve(x, y, lambda);

  // KKT on the standardized scale the solver works in.
  Eigen::VectorXd scale(p);
  for (int j = 0; j < p; ++j) scale[j] = std::sqrt(x.col(j).squaredNorm() / n);
  const Eigen::VectorXd resid = y - x * sol.coef;
  for (int j = 0; j < p; ++j) {
    const double grad = x.col(j).dot(resid) / (n * scale[j]);
    const double theta_std = sol.coef[j] * scale[j];
    if (theta_std != 0.0) {
      CHECK(std::abs(grad - lambda * (theta_std > 0 ? 1.0 : -1.0)) <= 1e-6);
    } else {
      CHECK(std::abs(grad) <= lambda + 1e-6);
    }
  }
}

TEST_CASE("lasso selection returns a floored dimension and a full trace") {
  const RegressionSample s = cubic_sample(80, 60, 10);
  const SelectionResult sel = select_lasso(s, 12, CvSpec{}, false);
  REQUIRE(sel.lasso.has_value());
  CHECK(sel.j_hat >= 4);
  CHECK(sel.j_hat <= 12);
  CHECK(sel.lasso->lambda_grid.size() == sel.lasso->cv_loss.size());
  CHECK(sel.lasso->nonzero_counts.size() == static_cast<size_t>(sel.lasso->lambda_grid.size()));
  CHECK(sel.lasso->lambda_hat > 0.0);
  // Counts along the path never exceed the sieve dimension actually built.
  for (int c : sel.lasso->nonzero_counts) CHECK(c <= 12);
  const SelectionResult again = select_lasso(s, 12, CvSpec{}, false);
  CHECK(again.j_hat == sel.j_hat);
  CHECK(again.lasso->lambda_hat == sel.lasso->lambda_hat);
}
