#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "statelp/panel.hpp"
#include "statelp/selection.hpp"

namespace statelp {

enum class DgpKind { Dgp1, Dgp2, Dgp3 };
enum class GKind { Cubic, Fourier, Custom };

/// Simulation law. Dgp1 is the workhorse: linear in the shock with constant
/// propagation rho. Dgp2 makes propagation shock-dependent
/// (rho_t = 0.5 + 0.3 tanh(X_{t-1})) and Dgp3 makes the shock enter
/// nonlinearly (g(z) x + 0.3 x^2); both are qualitative foils only.
struct DgpSpec {
  DgpKind kind = DgpKind::Dgp1;
  GKind g = GKind::Cubic;
  Eigen::VectorXd custom_coef;  // polynomial coefficients, low order first
  double rho = 0.8;
  double state_mean_var = 3.0;   // Var(mu_i)
  double state_ar = 0.8;         // xi persistence
  double state_innov_sd = 0.6;   // sqrt(1 - 0.8^2)
  int burn_in = 500;

  double g_eval(double z) const;
};

double g_cubic(double z);
double g_fourier(double z);

/// Simulate the panel, discarding burn_in initial periods. Deterministic in
/// (spec, n_units, n_periods, seed) and independent of any thread count.
PanelDataset simulate_dgp(const DgpSpec& spec, int n_units, int n_periods, std::uint64_t seed);

/// rho^h g(z) delta.
double true_irf(const DgpSpec& spec, int horizon, double delta, double z);

/// sqrt( integral over the grid of the mean squared estimation error ),
/// trapezoid quadrature. Curves and truth are per-unit-shock; delta scales
/// both sides, so rimse is exactly linear in delta.
double rimse(const std::vector<Eigen::VectorXd>& rep_curves,
             const Eigen::Ref<const Eigen::VectorXd>& truth_curve,
             const Eigen::Ref<const Eigen::VectorXd>& grid, double delta);

/// Coverage: fraction of replications whose band contains the truth at every
/// grid point. Width: mean over replications of the mean band width.
struct BandRecord {
  Eigen::VectorXd lo, hi;
};
std::pair<double, double> coverage_and_width(const std::vector<BandRecord>& bands,
                                             const Eigen::Ref<const Eigen::VectorXd>& truth_curve);

struct McConfig {
  DgpSpec dgp;
  int reps = 100;
  std::vector<int> n_list{500};
  std::vector<int> t_list{200};
  std::vector<int> horizons{0, 4, 8, 12};
  std::vector<double> deltas{0.5, 1.0, 2.0};
  std::vector<Selector> selectors{Selector::Aic};
  int oracle_j = 4;
  int j_lasso = 50;
  int b_draws = 2000;
  double alpha = 0.05;
  int rimse_grid_n = 500;
  double rimse_lo = -4.65;
  double rimse_hi = 4.65;
  int band_grid_n = 500;
  bool with_intermediate = true;
  bool linear_benchmark = true;
  bool bands = true;  // when off, only the point-estimate metrics are computed
  OutcomeMode mode = OutcomeMode::Level;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency
};

struct McRepRecord {
  int cell = 0;  // index into the (N, T) grid
  int rep = 0;
  int n_units = 0;
  int n_periods = 0;
  int horizon = 0;
  std::string estimator;  // selector name or "linear"
  int j_hat = 0;
  bool band_covers = false;
  double band_width = 0.0;
  bool failed = false;
  std::string error;
};

struct RimseCell {
  int n_units = 0, n_periods = 0, horizon = 0;
  double delta = 0.0;
  std::string estimator;
  double value = 0.0;
};

struct CoverageCell {
  std::string selector;
  int n_units = 0, n_periods = 0, horizon = 0;
  double coverage = 0.0;
  double mean_width = 0.0;
  int reps_used = 0;
};

struct McResult {
  std::vector<RimseCell> rimse;
  std::vector<CoverageCell> coverage;
  std::vector<McRepRecord> records;
  int failures = 0;
  int replications = 0;
};

/// Run the replication study. Replications execute in parallel; per-rep seeds
/// derive from (master seed, cell, rep) and results are reduced in replication
/// order, so the output is invariant to the worker count. Replication-level
/// failures are recorded and excluded; more than 5% failing raises StudyError.
McResult run_study(const McConfig& config);

}  // namespace statelp
