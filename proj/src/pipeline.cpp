#include "statelp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "statelp/errors.hpp"
#include "statelp/quadrature.hpp"
#include "statelp/rng.hpp"

namespace statelp {

PanelDataset with_lagged_outcome_control(PanelDataset panel) {
  panel.controls.push_back(panel.outcome);
  panel.control_names.push_back("y_lag");
  return panel;
}

namespace {

HorizonResult estimate_one_horizon(const PanelDataset& panel, const EstimateOptions& options,
                                   int h, double grid_lo, double grid_hi) {
  const RegressionSample sample =
      build_regression_sample(panel, h, options.mode, options.with_intermediate);
  auto shared = std::make_shared<const RegressionSample>(sample);

  SelectionResult sel;
  switch (options.selector) {
    case Selector::Aic:
      sel = select_aic(sample, options.candidates, options.with_intermediate);
      break;
    case Selector::Gcv:
      sel = select_gcv(sample, options.candidates, options.with_intermediate);
      break;
    case Selector::Lasso:
      sel = select_lasso(sample, options.j_lasso, options.cv, options.with_intermediate);
      break;
    case Selector::Oracle:
      sel = select_oracle(options.oracle_j);
      break;
  }

  HorizonResult result;
  result.horizon = h;
  const BasisSpec basis = make_basis(sample.state_at_base, sel.j_hat);
  result.fit = fit_ols(build_design(shared, basis, options.with_intermediate));
  result.selection = std::move(sel);

  const ScoreSeries scores = score_process(result.fit);
  const HacEstimate hac = bartlett_hac(scores);
  result.hac_lag = hac.lag;
  const CoefCovariance cov = coef_covariance(hac, result.fit);
  const Eigen::VectorXd grid = linspace(grid_lo, grid_hi, options.grid.n);
  result.curve = uniform_band(result.fit, cov, grid, options.b_draws, options.alpha, options.delta,
                              derive_stream(options.seed, static_cast<std::uint64_t>(h)));
  return result;
}

}  // namespace

EstimateResult estimate_irf(const PanelDataset& panel, const EstimateOptions& options) {
  if (options.horizons.empty()) throw ConfigError("no horizons requested");
  EstimateResult result;
  result.grid_lo = options.grid.lo.value_or(panel.state.minCoeff());
  result.grid_hi = options.grid.hi.value_or(panel.state.maxCoeff());
  if (!(result.grid_lo <= result.grid_hi)) throw ConfigError("grid bounds out of order");
  result.horizons.resize(options.horizons.size());

  const int n_h = static_cast<int>(options.horizons.size());
  int n_threads = std::max(1, options.threads);
  n_threads = std::min(n_threads, n_h);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int idx = next.fetch_add(1); idx < n_h; idx = next.fetch_add(1)) {
      try {
        result.horizons[idx] = estimate_one_horizon(panel, options, options.horizons[idx],
                                                    result.grid_lo, result.grid_hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace statelp
