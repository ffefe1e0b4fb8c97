#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "statelp/inference.hpp"
#include "statelp/montecarlo.hpp"
#include "statelp/panel.hpp"
#include "statelp/selection.hpp"

namespace statelp {

struct GridSpec {
  int n = 500;
  std::optional<double> lo;  // default: min observed state
  std::optional<double> hi;  // default: max observed state
};

struct EstimateOptions {
  std::vector<int> horizons{0};
  Selector selector = Selector::Aic;
  std::vector<int> candidates = default_candidates();
  int oracle_j = 4;
  int j_lasso = 50;
  CvSpec cv;
  OutcomeMode mode = OutcomeMode::Level;
  bool with_intermediate = true;
  double alpha = 0.05;
  int b_draws = 2000;
  double delta = 1.0;
  GridSpec grid;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct HorizonResult {
  int horizon = 0;
  SelectionResult selection;
  LpFit fit;
  IrfCurve curve;
  int hac_lag = 0;
};

struct EstimateResult {
  std::vector<HorizonResult> horizons;
  double grid_lo = 0.0, grid_hi = 0.0;
};

/// Full per-horizon pipeline: build the sample, select the sieve dimension,
/// fit, and construct pointwise intervals and the uniform band on the grid.
/// Horizons run in parallel when threads > 1; outputs do not depend on the
/// thread count.
EstimateResult estimate_irf(const PanelDataset& panel, const EstimateOptions& options);

/// Append a lagged-outcome control column (the regression reads controls at
/// t-1, so passing the outcome matrix itself yields Y_{i,t-1}).
PanelDataset with_lagged_outcome_control(PanelDataset panel);

}  // namespace statelp
