#pragma once

#include <Eigen/Dense>
#include <vector>

#include "statelp/estimator.hpp"

namespace statelp {

/// Capital-share-weighted cross-sectional mean of ghat at each unit's state,
/// one value per period, plus a 4-period centered moving average (NaN where
/// the window is incomplete).
struct AggregateResponse {
  std::vector<long long> periods;
  Eigen::VectorXd response;
  Eigen::VectorXd response_ma4;
};

/// states[p] and weights[p] hold the cross-section for period p. Weights must
/// be nonnegative; a period whose weights are all zero raises
/// AggregationError.
AggregateResponse aggregate_response(const LpFit& fit,
                                     const std::vector<long long>& periods,
                                     const std::vector<Eigen::VectorXd>& states,
                                     const std::vector<Eigen::VectorXd>& weights);

}  // namespace statelp
