#include "statelp/aggregate.hpp"

#include <cmath>
#include <limits>

#include "statelp/errors.hpp"

namespace statelp {

AggregateResponse aggregate_response(const LpFit& fit, const std::vector<long long>& periods,
                                     const std::vector<Eigen::VectorXd>& states,
                                     const std::vector<Eigen::VectorXd>& weights) {
  const size_t n_periods = periods.size();
  if (states.size() != n_periods || weights.size() != n_periods)
    throw InputError("periods, states and weights must align");

  AggregateResponse agg;
  agg.periods = periods;
  agg.response.resize(n_periods);
  for (size_t p = 0; p < n_periods; ++p) {
    const Eigen::VectorXd& w = weights[p];
    if (w.size() != states[p].size()) throw InputError("state/weight cross-sections must align");
    if ((w.array() < 0.0).any())
      throw InputError("negative weight in period " + std::to_string(periods[p]));
    const double total = w.sum();
    if (total <= 0.0) throw AggregationError(periods[p]);
    const Eigen::VectorXd g = evaluate_irf(fit, states[p], 1.0);
    agg.response[p] = g.dot(w) / total;
  }

  // Centered 4-period moving average with half weights on the end points.
  const double nan = std::numeric_limits<double>::quiet_NaN();
  agg.response_ma4 = Eigen::VectorXd::Constant(n_periods, nan);
  for (size_t p = 2; p + 2 < n_periods; ++p) {
    agg.response_ma4[p] = (0.5 * agg.response[p - 2] + agg.response[p - 1] + agg.response[p] +
                           agg.response[p + 1] + 0.5 * agg.response[p + 2]) /
                          4.0;
  }
  return agg;
}

}  // namespace statelp
