#include "statelp/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "statelp/errors.hpp"
#include "statelp/pipeline.hpp"
#include "statelp/quadrature.hpp"
#include "statelp/rng.hpp"

namespace statelp {

double g_cubic(double z) { return 0.5 * z + 0.3 * z * z - 0.25 * z * z * z; }

double g_fourier(double z) {
  const double u = (z + 4.65) / 9.3;
  const double two_pi = 2.0 * std::numbers::pi;
  return 0.8 * std::sin(two_pi * u) + 2.0 * std::cos(two_pi * u) - 0.5 * std::sin(2.0 * two_pi * u) +
         std::cos(2.0 * two_pi * u);
}

double DgpSpec::g_eval(double z) const {
  switch (g) {
    case GKind::Cubic: return g_cubic(z);
    case GKind::Fourier: return g_fourier(z);
    case GKind::Custom: {
      double acc = 0.0;
      double pow_z = 1.0;
      for (Eigen::Index k = 0; k < custom_coef.size(); ++k) {
        acc += custom_coef[k] * pow_z;
        pow_z *= z;
      }
      return acc;
    }
  }
  return 0.0;
}

PanelDataset simulate_dgp(const DgpSpec& spec, int n_units, int n_periods, std::uint64_t seed) {
  if (n_units < 1 || n_periods < 1) throw ConfigError("need N >= 1 and T >= 1");
  if (spec.burn_in < 0) throw ConfigError("negative burn-in");
  const int total = spec.burn_in + n_periods;

  // Common shock path, indices 0..total (index 0 only feeds the
  // shock-dependent propagation of Dgp2).
  Rng shock_rng = make_stream(seed, 0);
  Eigen::VectorXd x(total + 1);
  for (int t = 0; t <= total; ++t) x[t] = shock_rng.normal();

  PanelDataset panel;
  panel.unit_ids.reserve(n_units);
  panel.time_index.reserve(n_periods);
  for (int t = 1; t <= n_periods; ++t) panel.time_index.push_back(t);
  panel.outcome.resize(n_units, n_periods);
  panel.state.resize(n_units, n_periods);
  panel.shock = x.segment(spec.burn_in + 1, n_periods);

  const double mu_sd = std::sqrt(spec.state_mean_var);
  char id[24];
  for (int i = 0; i < n_units; ++i) {
    std::snprintf(id, sizeof(id), "u%04d", i + 1);
    panel.unit_ids.emplace_back(id);
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i) + 1);
    const double mu = mu_sd * rng.normal();
    double xi = rng.normal();  // stationary start, unit variance
    double z_lag = mu + xi;
    double y = 0.0;
    for (int t = 1; t <= total; ++t) {
      const double eps = rng.normal();
      const double v = rng.normal();
      double rho_t = spec.rho;
      double shock_term = spec.g_eval(z_lag) * x[t];
      if (spec.kind == DgpKind::Dgp2) rho_t = 0.5 + 0.3 * std::tanh(x[t - 1]);
      if (spec.kind == DgpKind::Dgp3) shock_term += 0.3 * x[t] * x[t];
      y = shock_term + rho_t * y + eps;
      xi = spec.state_ar * xi + spec.state_innov_sd * v;
      const double z = mu + xi;
      if (t > spec.burn_in) {
        panel.outcome(i, t - spec.burn_in - 1) = y;
        panel.state(i, t - spec.burn_in - 1) = z;
      }
      z_lag = z;
    }
  }
  return panel;
}

double true_irf(const DgpSpec& spec, int horizon, double delta, double z) {
  return std::pow(spec.rho, horizon) * spec.g_eval(z) * delta;
}

double rimse(const std::vector<Eigen::VectorXd>& rep_curves,
             const Eigen::Ref<const Eigen::VectorXd>& truth_curve,
             const Eigen::Ref<const Eigen::VectorXd>& grid, double delta) {
  if (rep_curves.empty()) throw MetricError("no replication curves");
  const Eigen::Index m = grid.size();
  if (truth_curve.size() != m) throw MetricError("truth curve does not match the grid");
  Eigen::VectorXd mse = Eigen::VectorXd::Zero(m);
  for (const auto& curve : rep_curves) {
    if (curve.size() != m) throw MetricError("replication curve does not match the grid");
    mse.array() += (curve - truth_curve).array().square();
  }
  mse /= static_cast<double>(rep_curves.size());
  return delta * std::sqrt(trapezoid(grid, mse));
}

std::pair<double, double> coverage_and_width(const std::vector<BandRecord>& bands,
                                             const Eigen::Ref<const Eigen::VectorXd>& truth_curve) {
  if (bands.empty()) throw MetricError("no replication bands");
  double covered = 0.0;
  double width = 0.0;
  for (const auto& band : bands) {
    if (band.lo.size() != truth_curve.size() || band.hi.size() != truth_curve.size())
      throw MetricError("band does not match the truth grid");
    const bool inside = (truth_curve.array() >= band.lo.array()).all() &&
                        (truth_curve.array() <= band.hi.array()).all();
    covered += inside ? 1.0 : 0.0;
    width += (band.hi - band.lo).mean();
  }
  const double reps = static_cast<double>(bands.size());
  return {covered / reps, width / reps};
}

namespace {

// Everything retained from one replication; aggregation happens afterwards in
// replication order so results do not depend on the worker schedule.
struct RepOutcome {
  bool failed = false;
  std::string error;
  // keyed by horizon index x estimator index
  std::vector<Eigen::VectorXd> rimse_curve;  // per-unit-delta estimates on the rimse grid
  std::vector<BandRecord> band;              // on the per-rep band grid
  std::vector<Eigen::VectorXd> band_truth;   // truth on that grid (per horizon)
  std::vector<int> j_hat;
  std::vector<double> width;
};

struct EstimatorSlot {
  bool linear = false;
  Selector selector = Selector::Aic;
  std::string name;
};

}  // namespace

McResult run_study(const McConfig& config) {
  if (config.reps < 1) throw ConfigError("need at least one replication");
  for (double d : config.deltas)
    if (!(d > 0.0)) throw ConfigError("shock sizes must be positive");

  std::vector<EstimatorSlot> slots;
  for (Selector s : config.selectors) slots.push_back({false, s, selector_name(s)});
  if (config.linear_benchmark) slots.push_back({true, Selector::Aic, "linear"});
  const int n_slots = static_cast<int>(slots.size());
  const int n_h = static_cast<int>(config.horizons.size());

  const Eigen::VectorXd rimse_grid = linspace(config.rimse_lo, config.rimse_hi, config.rimse_grid_n);
  std::vector<Eigen::VectorXd> rimse_truth(n_h);
  for (int hi = 0; hi < n_h; ++hi) {
    Eigen::VectorXd truth(rimse_grid.size());
    for (Eigen::Index m = 0; m < rimse_grid.size(); ++m)
      truth[m] = true_irf(config.dgp, config.horizons[hi], 1.0, rimse_grid[m]);
    rimse_truth[hi] = truth;
  }

  struct Cell {
    int n_units, n_periods;
  };
  std::vector<Cell> cells;
  for (int n : config.n_list)
    for (int t : config.t_list) cells.push_back({n, t});

  McResult result;
  result.replications = static_cast<int>(cells.size()) * config.reps;

  for (size_t cell_idx = 0; cell_idx < cells.size(); ++cell_idx) {
    const Cell cell = cells[cell_idx];
    const std::uint64_t cell_seed = derive_stream(config.seed, cell_idx);
    std::vector<RepOutcome> outcomes(config.reps);

    auto run_rep = [&](int rep) {
      RepOutcome& out = outcomes[rep];
      out.rimse_curve.assign(static_cast<size_t>(n_h) * n_slots, Eigen::VectorXd());
      out.band.assign(static_cast<size_t>(n_h) * n_slots, BandRecord{});
      out.band_truth.assign(n_h, Eigen::VectorXd());
      out.j_hat.assign(static_cast<size_t>(n_h) * n_slots, 0);
      out.width.assign(static_cast<size_t>(n_h) * n_slots, 0.0);
      const std::uint64_t rep_seed = derive_stream(cell_seed, static_cast<std::uint64_t>(rep) + 1);
      try {
        PanelDataset panel =
            with_lagged_outcome_control(simulate_dgp(config.dgp, cell.n_units, cell.n_periods, rep_seed));
        const double z_min = panel.state.minCoeff();
        const double z_max = panel.state.maxCoeff();
        const Eigen::VectorXd band_grid = linspace(z_min, z_max, config.band_grid_n);

        for (int hi = 0; hi < n_h; ++hi) {
          const int h = config.horizons[hi];
          Eigen::VectorXd truth(band_grid.size());
          for (Eigen::Index m = 0; m < band_grid.size(); ++m)
            truth[m] = true_irf(config.dgp, h, 1.0, band_grid[m]);
          out.band_truth[hi] = truth;

          const RegressionSample sample =
              build_regression_sample(panel, h, config.mode, config.with_intermediate);
          auto shared = std::make_shared<const RegressionSample>(sample);

          for (int si = 0; si < n_slots; ++si) {
            const size_t key = static_cast<size_t>(hi) * n_slots + si;
            if (slots[si].linear) {
              const LinearLpFit lin = fit_linear_lp(sample);
              out.rimse_curve[key] =
                  (lin.alpha + lin.beta * rimse_grid.array()).matrix();
              continue;
            }
            SelectionResult sel;
            switch (slots[si].selector) {
              case Selector::Aic:
                sel = select_aic(sample, default_candidates(), config.with_intermediate);
                break;
              case Selector::Gcv:
                sel = select_gcv(sample, default_candidates(), config.with_intermediate);
                break;
              case Selector::Lasso:
                sel = select_lasso(sample, config.j_lasso, CvSpec{}, config.with_intermediate);
                break;
              case Selector::Oracle:
                sel = select_oracle(config.oracle_j);
                break;
            }
            const BasisSpec basis = make_basis(sample.state_at_base, sel.j_hat);
            const LpFit fit = fit_ols(build_design(shared, basis, config.with_intermediate));
            out.j_hat[key] = sel.j_hat;
            out.rimse_curve[key] = evaluate_irf(fit, rimse_grid, 1.0);
            if (config.bands) {
              const ScoreSeries scores = score_process(fit);
              const CoefCovariance cov = coef_covariance(bartlett_hac(scores), fit);
              const std::uint64_t band_seed =
                  derive_stream(rep_seed, 0x9000 + static_cast<std::uint64_t>(key));
              const IrfCurve curve =
                  uniform_band(fit, cov, band_grid, config.b_draws, config.alpha, 1.0, band_seed);
              out.band[key] = {curve.band_lo, curve.band_hi};
              out.width[key] = 2.0 * curve.critical_value;
            }
          }
        }
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
      }
    };

    int n_threads = config.threads > 0 ? config.threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, config.reps));
    if (n_threads == 1) {
      for (int rep = 0; rep < config.reps; ++rep) run_rep(rep);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> workers;
      workers.reserve(n_threads);
      for (int w = 0; w < n_threads; ++w)
        workers.emplace_back([&] {
          for (int rep = next.fetch_add(1); rep < config.reps; rep = next.fetch_add(1))
            run_rep(rep);
        });
      for (auto& w : workers) w.join();
    }

    // Reduce in replication order.
    for (int rep = 0; rep < config.reps; ++rep) {
      const RepOutcome& out = outcomes[rep];
      if (out.failed) {
        ++result.failures;
        McRepRecord record;
        record.cell = static_cast<int>(cell_idx);
        record.rep = rep;
        record.n_units = cell.n_units;
        record.n_periods = cell.n_periods;
        record.failed = true;
        record.error = out.error;
        result.records.push_back(std::move(record));
        continue;
      }
      for (int hi = 0; hi < n_h; ++hi)
        for (int si = 0; si < n_slots; ++si) {
          const size_t key = static_cast<size_t>(hi) * n_slots + si;
          McRepRecord record;
          record.cell = static_cast<int>(cell_idx);
          record.rep = rep;
          record.n_units = cell.n_units;
          record.n_periods = cell.n_periods;
          record.horizon = config.horizons[hi];
          record.estimator = slots[si].name;
          record.j_hat = out.j_hat[key];
          if (config.bands && !slots[si].linear) {
            record.band_covers = (out.band_truth[hi].array() >= out.band[key].lo.array()).all() &&
                                 (out.band_truth[hi].array() <= out.band[key].hi.array()).all();
            record.band_width = out.width[key];
          }
          result.records.push_back(std::move(record));
        }
    }

    for (int hi = 0; hi < n_h; ++hi) {
      for (int si = 0; si < n_slots; ++si) {
        const size_t key = static_cast<size_t>(hi) * n_slots + si;
        std::vector<Eigen::VectorXd> curves;
        curves.reserve(config.reps);
        for (int rep = 0; rep < config.reps; ++rep)
          if (!outcomes[rep].failed) curves.push_back(outcomes[rep].rimse_curve[key]);
        if (curves.empty()) continue;
        for (double delta : config.deltas) {
          RimseCell rc;
          rc.n_units = cell.n_units;
          rc.n_periods = cell.n_periods;
          rc.horizon = config.horizons[hi];
          rc.delta = delta;
          rc.estimator = slots[si].name;
          rc.value = rimse(curves, rimse_truth[hi], rimse_grid, delta);
          result.rimse.push_back(std::move(rc));
        }
        if (config.bands && !slots[si].linear) {
          double covered = 0.0, width = 0.0;
          int used = 0;
          for (int rep = 0; rep < config.reps; ++rep) {
            const RepOutcome& out = outcomes[rep];
            if (out.failed) continue;
            const bool inside =
                (out.band_truth[hi].array() >= out.band[key].lo.array()).all() &&
                (out.band_truth[hi].array() <= out.band[key].hi.array()).all();
            covered += inside ? 1.0 : 0.0;
            width += out.width[key];
            ++used;
          }
          if (used > 0) {
            CoverageCell cc;
            cc.selector = slots[si].name;
            cc.n_units = cell.n_units;
            cc.n_periods = cell.n_periods;
            cc.horizon = config.horizons[hi];
            cc.coverage = covered / used;
            cc.mean_width = width / used;
            cc.reps_used = used;
            result.coverage.push_back(std::move(cc));
          }
        }
      }
    }
  }

  if (result.failures * 20 > result.replications)
    throw StudyError(std::to_string(result.failures) + " of " +
                     std::to_string(result.replications) + " replications failed");
  return result;
}

}  // namespace statelp
