#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "statelp/panel.hpp"

namespace statelp {

enum class Selector { Aic, Gcv, Lasso, Oracle };

std::string selector_name(Selector s);
Selector parse_selector(const std::string& name);

struct CandidateTrace {
  int requested_j = 0;
  int effective_j = 0;  // after tied-quantile deduplication
  double criterion = 0.0;
  double ssr = 0.0;
  long k_params = 0;
  bool skipped = false;
  std::string skip_reason;
};

struct LassoTrace {
  Eigen::VectorXd lambda_grid;      // descending
  std::vector<int> nonzero_counts;  // sieve-block nonzeros along the full-data path
  Eigen::VectorXd cv_loss;          // mean out-of-fold SSE per lambda
  double lambda_hat = 0.0;
  int nonzero_at_hat = 0;  // before the refit floor of 4
};

struct SelectionResult {
  Selector selector = Selector::Aic;
  int j_hat = 0;
  std::vector<CandidateTrace> trace;
  std::optional<LassoTrace> lasso;
};

/// Default candidate set {4, ..., 20}.
std::vector<int> default_candidates();

/// AIC over the candidate dimensions: n log(SSR/n) + 2 K_J, where K_J counts
/// every estimated parameter (sieve, intermediate blocks when present,
/// controls). Ties break toward the smaller J; rank-deficient candidates are
/// skipped with a recorded reason.
SelectionResult select_aic(const RegressionSample& sample, const std::vector<int>& candidates,
                           bool with_intermediate);

/// GCV = SSR / (n (1 - K_J/n)^2); candidates with K_J >= n are skipped.
SelectionResult select_gcv(const RegressionSample& sample, const std::vector<int>& candidates,
                           bool with_intermediate);

struct CvSpec {
  int folds = 5;
  std::uint64_t seed = 0;  // folds are deterministic contiguous time blocks; kept for interface
                           // stability
};

/// l1-penalized fit on a J_lasso-dimensional basis, lambda chosen by
/// block-time cross-validation; the selected dimension is the count of
/// nonzero sieve coefficients at lambda_hat, floored at 4 for the refit.
SelectionResult select_lasso(const RegressionSample& sample, int j_lasso, const CvSpec& cv,
                             bool with_intermediate);

SelectionResult select_oracle(int j_fixed);

/// Cyclic coordinate descent for (1/2n)||y - X theta||^2 + lambda ||theta||_1
/// with columns scaled to unit root-mean-square. Exposed for direct testing;
/// coefficients are returned on the original column scale.
struct LassoSolution {
  Eigen::VectorXd coef;
  int sweeps = 0;
};
LassoSolution lasso_solve(const Eigen::Ref<const Eigen::MatrixXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y, double lambda);

}  // namespace statelp
