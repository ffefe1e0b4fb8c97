#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "statelp/aggregate.hpp"
#include "statelp/errors.hpp"
#include "statelp/montecarlo.hpp"
#include "statelp/panel.hpp"
#include "statelp/pipeline.hpp"
#include "statelp/quadrature.hpp"

namespace fs = std::filesystem;
using namespace statelp;

namespace {

std::string binary() {
  const char* bin = std::getenv("STATELP_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "STATELP_BIN must point at the CLI binary");
  return bin;
}

int run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("statelp_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_sim_panel(const fs::path& dir, int n, int t, std::uint64_t seed) {
  const PanelDataset panel = with_lagged_outcome_control(simulate_dgp(DgpSpec{}, n, t, seed));
  const fs::path path = dir / "panel.csv";
  std::ofstream out(path);
  write_panel(panel, out);
  return path;
}

}  // namespace

TEST_CASE("estimate writes one curve per horizon plus summary and manifest") {
  const fs::path dir = fresh_dir("estimate");
  const fs::path panel = write_sim_panel(dir, 60, 80, 31);
  const std::string out = (dir / "out").string();
  const int rc = run("estimate " + panel.string() +
                     " --horizons 0..4 --selector oracle --oracle-j 4 --bootstrap 200 "
                     "--grid 80 --seed 5 --out " + out);
  CHECK(rc == 0);
  for (int h = 0; h <= 4; ++h) {
    const std::string body = slurp(fs::path(out) / ("irf_h" + std::to_string(h) + ".csv"));
    CHECK(body.rfind("z,estimate,se,ci_lo,ci_hi,band_lo,band_hi\n", 0) == 0);
  }
  CHECK(fs::exists(fs::path(out) / "summary.json"));
  CHECK(fs::exists(fs::path(out) / "manifest.json"));
}

TEST_CASE("estimate is byte-identical across reruns") {
  const fs::path dir = fresh_dir("estimate_repeat");
  const fs::path panel = write_sim_panel(dir, 40, 60, 32);
  const std::string out1 = (dir / "a").string();
  const std::string out2 = (dir / "b").string();
  const std::string flags =
      " --horizons 0,1 --selector aic --bootstrap 300 --grid 50 --seed 9 --out ";
  CHECK(run("estimate " + panel.string() + flags + out1) == 0);
  CHECK(run("estimate " + panel.string() + flags + out2) == 0);
  for (const char* name : {"irf_h0.csv", "irf_h1.csv", "summary.json"})
    CHECK(slurp(fs::path(out1) / name) == slurp(fs::path(out2) / name));
}

TEST_CASE("oracle selector without --oracle-j exits with the config code") {
  const fs::path dir = fresh_dir("oracle_flag");
  const fs::path panel = write_sim_panel(dir, 20, 30, 33);
  CHECK(run("estimate " + panel.string() + " --selector oracle --out " + dir.string()) == 3);
}

TEST_CASE("bad panel input exits with the input code") {
  const fs::path dir = fresh_dir("bad_panel");
  const fs::path path = dir / "broken.csv";
  std::ofstream(path) << "unit,time,y,x,z\na,1,1.0,0.5,oops\na,2,1.0,0.5,0.2\n";
  CHECK(run("estimate " + path.string() + " --out " + dir.string()) == 1);
  CHECK(run("estimate " + (dir / "missing.csv").string() + " --out " + dir.string()) == 1);
}

TEST_CASE("simulate runs a toy config and rejects unknown keys") {
  const fs::path dir = fresh_dir("simulate");
  const fs::path config = dir / "study.cfg";
  std::ofstream(config) << "reps=2\nn=30\nt=50\nhorizons=0\ndeltas=1\nselectors=oracle\n"
                           "oracle_j=4\nb=200\nband_grid=50\nrimse_grid=50:-4.65:4.65\nseed=3\n";
  const std::string out = (dir / "out").string();
  CHECK(run("simulate " + config.string() + " --out " + out) == 0);
  const std::string rimse = slurp(fs::path(out) / "rimse.csv");
  CHECK(rimse.rfind("n,t,h,delta,estimator,rimse\n", 0) == 0);
  CHECK(slurp(fs::path(out) / "coverage.csv")
            .rfind("selector,n,t,h,coverage,mean_width,reps_used\n", 0) == 0);

  const fs::path bad = dir / "bad.cfg";
  std::ofstream(bad) << "reps=2\nnn_units=30\n";
  CHECK(run("simulate " + bad.string() + " --out " + out) == 3);
}

TEST_CASE("diagnose-linear analytic example hits the closed-form slope") {
  const fs::path dir = fresh_dir("diag");
  const std::string out = (dir / "out").string();
  CHECK(run("diagnose-linear --analytic-example --grid 801 --out " + out) == 0);
  const std::string summary = slurp(fs::path(out) / "summary.json");
  const auto beta_pos = summary.find("\"beta\":");
  REQUIRE(beta_pos != std::string::npos);
  const double beta = std::stod(summary.substr(beta_pos + 7));
  CHECK(std::abs(beta - (-1.0 / 28.0)) <= 1e-6);

  // The emitted integrand column must integrate back to beta.
  std::ifstream curve(fs::path(out) / "weight_curve.csv");
  std::string line;
  std::getline(curve, line);
  CHECK(line == "z,omega,gprime,integrand");
  std::vector<double> zs, integrand;
  while (std::getline(curve, line)) {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    zs.push_back(std::stod(cell));
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    integrand.push_back(std::stod(cell));
  }
  const Eigen::Map<Eigen::VectorXd> grid(zs.data(), zs.size());
  const Eigen::Map<Eigen::VectorXd> values(integrand.data(), integrand.size());
  CHECK(std::abs(trapezoid(grid, values) - beta) <= 1e-4);
}

TEST_CASE("diagnose-linear on a constant-state panel exits with the numeric code") {
  const fs::path dir = fresh_dir("diag_degenerate");
  const fs::path path = dir / "flat.csv";
  std::ofstream out(path);
  out << "unit,time,y,x,z\n";
  for (int t = 1; t <= 6; ++t)
    out << "a," << t << ",1.0," << 0.1 * t << ",2.0\n";
  out.close();
  CHECK(run("diagnose-linear --panel " + path.string() + " --out " + dir.string()) == 2);
}

TEST_CASE("aggregate on a single unit returns the fitted curve at its states") {
  const fs::path dir = fresh_dir("aggregate");
  // Build a one-unit panel with a positive weight column.
  PanelDataset panel = with_lagged_outcome_control(simulate_dgp(DgpSpec{}, 1, 120, 77));
  Eigen::MatrixXd weights =
      Eigen::MatrixXd::Constant(panel.n_units(), panel.n_periods(), 3.0);
  panel.controls.push_back(weights);
  panel.control_names.push_back("cap");
  const fs::path path = dir / "panel.csv";
  {
    std::ofstream out(path);
    write_panel(panel, out);
  }
  const std::string out = (dir / "out").string();
  CHECK(run("aggregate " + path.string() +
            " --weights cap --horizon 0 --selector oracle --oracle-j 4 --bootstrap 200 --out " +
            out) == 0);
  const std::string body = slurp(fs::path(out) / "aggregate.csv");
  CHECK(body.rfind("time,response,response_ma4\n", 0) == 0);

  // Oracle comparison computed in-process: single unit => response equals
  // ghat at that unit's lagged state.
  EstimateOptions options;
  options.horizons = {0};
  options.selector = Selector::Oracle;
  options.oracle_j = 4;
  options.b_draws = 200;
  PanelDataset no_weights = panel;
  no_weights.controls.pop_back();
  no_weights.control_names.pop_back();
  const EstimateResult est = estimate_irf(no_weights, options);
  std::istringstream rows(body.substr(body.find('\n') + 1));
  std::string line;
  int p = 1;
  while (std::getline(rows, line) && p < panel.n_periods()) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double got = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    const double want =
        evaluate_irf(est.horizons[0].fit, panel.state.col(p - 1), 1.0)[0];
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
    ++p;
  }
}

TEST_CASE("aggregate library op: weighted mean, symmetry and zero-weight errors") {
  const PanelDataset panel = with_lagged_outcome_control(simulate_dgp(DgpSpec{}, 30, 60, 78));
  EstimateOptions options;
  options.horizons = {0};
  options.selector = Selector::Oracle;
  options.oracle_j = 4;
  options.b_draws = 200;
  const EstimateResult est = estimate_irf(panel, options);
  const LpFit& fit = est.horizons[0].fit;

  // Hand-built three-unit period.
  std::vector<long long> periods{7};
  std::vector<Eigen::VectorXd> states{Eigen::VectorXd(3)};
  std::vector<Eigen::VectorXd> weights{Eigen::VectorXd(3)};
  states[0] << -1.0, 0.3, 2.0;
  weights[0] << 2.0, 0.0, 6.0;
  const AggregateResponse agg = aggregate_response(fit, periods, states, weights);
  const Eigen::VectorXd g = evaluate_irf(fit, states[0], 1.0);
  CHECK(agg.response[0] == doctest::Approx((2.0 * g[0] + 6.0 * g[2]) / 8.0).epsilon(1e-12));

  weights[0].setZero();
  CHECK_THROWS_AS(aggregate_response(fit, periods, states, weights), AggregationError);
  weights[0] << 1.0, -0.5, 1.0;
  CHECK_THROWS_AS(aggregate_response(fit, periods, states, weights), InputError);
}
