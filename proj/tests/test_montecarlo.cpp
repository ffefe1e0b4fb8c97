#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "statelp/errors.hpp"
#include "statelp/montecarlo.hpp"
#include "statelp/pipeline.hpp"

using namespace statelp;

TEST_CASE("cubic response values") {
  CHECK(g_cubic(0.0) == 0.0);
  CHECK(g_cubic(1.0) == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(g_cubic(2.0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("fourier response values at the normalization anchors") {
  CHECK(g_fourier(-4.65) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(g_fourier(4.65) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(g_fourier(0.0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("true impulse response composition") {
  DgpSpec spec;
  CHECK(true_irf(spec, 0, 1.0, 1.0) == doctest::Approx(0.55));
  CHECK(true_irf(spec, 4, 1.0, 2.0) == doctest::Approx(0.08192).epsilon(1e-12));
  CHECK(true_irf(spec, 3, 0.0, 1.7) == 0.0);
}

TEST_CASE("true response decays geometrically in the horizon") {
  DgpSpec spec;
  for (int h = 0; h < 10; ++h) {
    const double ratio = true_irf(spec, h + 1, 1.0, 2.0) / true_irf(spec, h, 1.0, 2.0);
    CHECK(ratio == doctest::Approx(0.8).epsilon(1e-12));
  }
}

TEST_CASE("simulation is deterministic in the seed") {
  DgpSpec spec;
  const PanelDataset a = simulate_dgp(spec, 5, 20, 9001);
  const PanelDataset b = simulate_dgp(spec, 5, 20, 9001);
  const PanelDataset c = simulate_dgp(spec, 5, 20, 9002);
  CHECK((a.outcome - b.outcome).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((a.state - b.state).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((a.shock - b.shock).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((a.outcome - c.outcome).lpNorm<Eigen::Infinity>() != 0.0);
}

TEST_CASE("zero response function makes the outcome independent of the shock") {
  DgpSpec spec;
  spec.g = GKind::Custom;
  spec.custom_coef = Eigen::VectorXd::Zero(1);
  const PanelDataset panel = simulate_dgp(spec, 500, 200, 5);
  double num = 0.0, y_ss = 0.0, x_ss = 0.0;
  const double y_mean = panel.outcome.mean();
  const double x_mean = panel.shock.mean();
  for (int t = 0; t < panel.n_periods(); ++t)
    for (int i = 0; i < panel.n_units(); ++i) {
      num += (panel.outcome(i, t) - y_mean) * (panel.shock[t] - x_mean);
      y_ss += std::pow(panel.outcome(i, t) - y_mean, 2);
      x_ss += std::pow(panel.shock[t] - x_mean, 2) ;
    }
  const double corr = num / std::sqrt(y_ss * x_ss / panel.n_units());
  CHECK(std::abs(corr / panel.n_units()) <= 0.05);
}

TEST_CASE("stationary state variance is the mean variance plus one") {
  DgpSpec spec;
  const PanelDataset panel = simulate_dgp(spec, 500, 200, 6);
  const double mean = panel.state.mean();
  const double var = (panel.state.array() - mean).square().mean();
  CHECK(var == doctest::Approx(4.0).epsilon(0.10));
}

TEST_CASE("shock-dependent propagation changes the law") {
  DgpSpec spec2;
  spec2.kind = DgpKind::Dgp2;
  DgpSpec spec3;
  spec3.kind = DgpKind::Dgp3;
  const PanelDataset p1 = simulate_dgp(DgpSpec{}, 4, 12, 7);
  const PanelDataset p2 = simulate_dgp(spec2, 4, 12, 7);
  const PanelDataset p3 = simulate_dgp(spec3, 4, 12, 7);
  CHECK((p1.outcome - p2.outcome).lpNorm<Eigen::Infinity>() != 0.0);
  CHECK((p1.outcome - p3.outcome).lpNorm<Eigen::Infinity>() != 0.0);
  // States and shocks share the same streams across variants.
  CHECK((p1.state - p2.state).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((p1.shock - p3.shock).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("rimse of exact estimates is zero") {
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(50, -1.0, 1.0);
  Eigen::VectorXd truth(grid.size());
  for (int m = 0; m < grid.size(); ++m) truth[m] = g_cubic(grid[m]);
  CHECK(rimse({truth, truth}, truth, grid, 1.0) == 0.0);
}

TEST_CASE("rimse of a constant error has a closed form") {
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(101, 0.0, 2.5);
  const Eigen::VectorXd truth = Eigen::VectorXd::Zero(grid.size());
  const double err = -0.7;
  const Eigen::VectorXd est = Eigen::VectorXd::Constant(grid.size(), err);
  CHECK(rimse({est}, truth, grid, 1.0) ==
        doctest::Approx(std::abs(err) * std::sqrt(2.5)).epsilon(1e-12));
}

TEST_CASE("rimse scales exactly with delta") {
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(77, -2.0, 2.0);
  Eigen::VectorXd truth(grid.size()), est(grid.size());
  for (int m = 0; m < grid.size(); ++m) {
    truth[m] = g_cubic(grid[m]);
    est[m] = truth[m] + 0.1 * std::sin(grid[m] * 5.0);
  }
  const double at_one = rimse({est}, truth, grid, 1.0);
  const double at_two = rimse({est}, truth, grid, 2.0);
  CHECK(at_two / at_one == 2.0);
}

TEST_CASE("coverage and width from hand-built bands") {
  const Eigen::VectorXd truth = Eigen::VectorXd::Zero(5);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<BandRecord> bands;
  bands.push_back({Eigen::VectorXd::Constant(5, -inf), Eigen::VectorXd::Constant(5, inf)});
  auto [cov_inf, width_inf] = coverage_and_width({bands[0]}, truth);
  CHECK(cov_inf == 1.0);

  BandRecord off;  // zero width away from the truth
  off.lo = Eigen::VectorXd::Constant(5, 1.0);
  off.hi = Eigen::VectorXd::Constant(5, 1.0);
  auto [cov_zero, width_zero] = coverage_and_width({off}, truth);
  CHECK(cov_zero == 0.0);
  CHECK(width_zero == 0.0);

  BandRecord good;
  good.lo = Eigen::VectorXd::Constant(5, -0.5);
  good.hi = Eigen::VectorXd::Constant(5, 0.5);
  BandRecord bad = off;
  auto [cov_23, width_23] = coverage_and_width({good, good, bad}, truth);
  CHECK(cov_23 == doctest::Approx(2.0 / 3.0));
  CHECK(width_23 == doctest::Approx(2.0 / 3.0));  // (1 + 1 + 0) / 3
}

TEST_CASE("grid mismatch raises MetricError") {
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  const Eigen::VectorXd truth = Eigen::VectorXd::Zero(10);
  const Eigen::VectorXd short_curve = Eigen::VectorXd::Zero(9);
  CHECK_THROWS_AS(rimse({short_curve}, truth, grid, 1.0), MetricError);
  BandRecord band;
  band.lo = Eigen::VectorXd::Zero(9);
  band.hi = Eigen::VectorXd::Zero(9);
  CHECK_THROWS_AS(coverage_and_width({band}, truth), MetricError);
}

namespace {

McConfig tiny_config() {
  McConfig config;
  config.reps = 4;
  config.n_list = {40};
  config.t_list = {60};
  config.horizons = {0, 1};
  config.deltas = {1.0, 2.0};
  config.selectors = {Selector::Oracle};
  config.oracle_j = 4;
  config.b_draws = 200;
  config.rimse_grid_n = 60;
  config.band_grid_n = 60;
  config.seed = 77;
  return config;
}

}  // namespace

TEST_CASE("study output is invariant to the worker count") {
  McConfig config = tiny_config();
  config.threads = 1;
  const McResult a = run_study(config);
  config.threads = 3;
  const McResult b = run_study(config);
  REQUIRE(a.rimse.size() == b.rimse.size());
  for (size_t i = 0; i < a.rimse.size(); ++i) {
    CHECK(a.rimse[i].value == b.rimse[i].value);
    CHECK(a.rimse[i].estimator == b.rimse[i].estimator);
  }
  REQUIRE(a.coverage.size() == b.coverage.size());
  for (size_t i = 0; i < a.coverage.size(); ++i) {
    CHECK(a.coverage[i].coverage == b.coverage[i].coverage);
    CHECK(a.coverage[i].mean_width == b.coverage[i].mean_width);
  }
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].rep == b.records[i].rep);
    CHECK(a.records[i].band_width == b.records[i].band_width);
  }
}

TEST_CASE("single-replication study reproduces that replication's metrics") {
  McConfig config = tiny_config();
  config.reps = 1;
  config.horizons = {0};
  config.deltas = {1.0};
  const McResult result = run_study(config);
  REQUIRE(result.coverage.size() == 1);
  CHECK((result.coverage[0].coverage == 0.0 || result.coverage[0].coverage == 1.0));
  REQUIRE(result.records.size() == 2);  // oracle + linear rows
  bool found = false;
  for (const auto& r : result.records)
    if (r.estimator == "oracle") {
      CHECK(result.coverage[0].mean_width == r.band_width);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("an infeasible horizon fails every replication and trips StudyError") {
  McConfig config = tiny_config();
  config.t_list = {9};
  config.horizons = {8};
  CHECK_THROWS_AS(run_study(config), StudyError);
}

TEST_CASE("delta scaling is exact in study tables") {
  const McResult result = run_study(tiny_config());
  double at_one = -1.0, at_two = -1.0;
  for (const auto& cell : result.rimse) {
    if (cell.horizon == 1 && cell.estimator == "oracle") {
      if (cell.delta == 1.0) at_one = cell.value;
      if (cell.delta == 2.0) at_two = cell.value;
    }
  }
  REQUIRE(at_one > 0.0);
  CHECK(at_two / at_one == 2.0);
}
