#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "statelp/csv.hpp"

#include "statelp/aggregate.hpp"
#include "statelp/errors.hpp"
#include "statelp/misspec.hpp"
#include "statelp/montecarlo.hpp"
#include "statelp/pipeline.hpp"
#include "statelp/quadrature.hpp"
#include "statelp/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace statelp;

namespace {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[20];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return hex;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
}

struct ManifestBuilder {
  json doc;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  ManifestBuilder(const std::string& command, std::uint64_t seed) {
    doc["command"] = command;
    doc["seed"] = seed;
    doc["versions"] = {{"statelp", kVersion}, {"compiler", __VERSION__}};
    doc["inputs"] = json::object();
    doc["outputs"] = json::array();
  }
  void input(const std::string& path) { doc["inputs"][path] = file_digest(path); }
  void output(const fs::path& path) { doc["outputs"].push_back(path.filename().string()); }
  void write(const fs::path& dir) {
    doc["timing_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text(dir / "manifest.json", doc.dump(2) + "\n");
  }
};

std::vector<int> parse_horizons(const std::string& spec) {
  std::vector<int> out;
  std::string token;
  std::istringstream in(spec);
  while (std::getline(in, token, ',')) {
    const auto dots = token.find("..");
    if (dots != std::string::npos) {
      const int lo = std::stoi(token.substr(0, dots));
      const int hi = std::stoi(token.substr(dots + 2));
      for (int h = lo; h <= hi; ++h) out.push_back(h);
    } else if (!token.empty()) {
      out.push_back(std::stoi(token));
    }
  }
  if (out.empty()) throw ConfigError("empty horizon list");
  return out;
}

GridSpec parse_grid(const std::string& spec) {
  GridSpec grid;
  std::istringstream in(spec);
  std::string token;
  std::vector<std::string> parts;
  while (std::getline(in, token, ':')) parts.push_back(token);
  if (parts.empty() || parts.size() == 2 || parts.size() > 3)
    throw ConfigError("grid must be n or n:lo:hi, got '" + spec + "'");
  grid.n = std::stoi(parts[0]);
  if (grid.n < 1) throw ConfigError("grid needs at least one point");
  if (parts.size() == 3) {
    grid.lo = std::stod(parts[1]);
    grid.hi = std::stod(parts[2]);
  }
  return grid;
}

OutcomeMode parse_mode(const std::string& name) {
  if (name == "level") return OutcomeMode::Level;
  if (name == "cum-t") return OutcomeMode::CumulativeFromT;
  if (name == "cum-t1") return OutcomeMode::CumulativeFromTMinus1;
  throw ConfigError("unknown mode '" + name + "'");
}

bool parse_on_off(const std::string& value, const std::string& key) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError("value of '" + key + "' must be on or off");
}

json selection_to_json(const SelectionResult& sel) {
  json out;
  out["selector"] = selector_name(sel.selector);
  out["j_hat"] = sel.j_hat;
  json trace = json::array();
  for (const auto& c : sel.trace) {
    json entry = {{"requested_j", c.requested_j}, {"effective_j", c.effective_j}};
    if (c.skipped) {
      entry["skipped"] = c.skip_reason;
    } else {
      entry["criterion"] = c.criterion;
      entry["ssr"] = c.ssr;
      entry["k_params"] = c.k_params;
    }
    trace.push_back(entry);
  }
  out["trace"] = trace;
  if (sel.lasso) {
    json l;
    l["lambda_hat"] = sel.lasso->lambda_hat;
    l["nonzero_at_hat"] = sel.lasso->nonzero_at_hat;
    l["lambda_grid"] = std::vector<double>(sel.lasso->lambda_grid.begin(),
                                           sel.lasso->lambda_grid.end());
    l["cv_loss"] = std::vector<double>(sel.lasso->cv_loss.begin(), sel.lasso->cv_loss.end());
    l["nonzero_counts"] = sel.lasso->nonzero_counts;
    out["lasso"] = l;
  }
  return out;
}

std::string irf_curve_csv(const IrfCurve& curve) {
  std::ostringstream out;
  out << "z,estimate,se,ci_lo,ci_hi,band_lo,band_hi\n";
  for (Eigen::Index m = 0; m < curve.grid.size(); ++m) {
    out << format_result(curve.grid[m]) << ',' << format_result(curve.estimate[m]) << ','
        << format_result(curve.pointwise_se[m]) << ',' << format_result(curve.ci_lo[m]) << ','
        << format_result(curve.ci_hi[m]) << ',' << format_result(curve.band_lo[m]) << ','
        << format_result(curve.band_hi[m]) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string panel;
  std::string horizons = "0";
  std::string selector = "aic";
  int oracle_j = 0;
  double alpha = 0.05;
  int bootstrap = 2000;
  std::string grid = "500";
  std::string mode = "level";
  std::string intermediate = "on";
  double delta = 1.0;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = ".";
};

int run_estimate(const EstimateArgs& args) {
  EstimateOptions options;
  options.horizons = parse_horizons(args.horizons);
  options.selector = parse_selector(args.selector);
  if (options.selector == Selector::Oracle) {
    if (args.oracle_j == 0) throw ConfigError("selector 'oracle' requires --oracle-j");
    options.oracle_j = args.oracle_j;
  }
  options.alpha = args.alpha;
  options.b_draws = args.bootstrap;
  options.grid = parse_grid(args.grid);
  options.mode = parse_mode(args.mode);
  options.with_intermediate = parse_on_off(args.intermediate, "--intermediate");
  options.delta = args.delta;
  options.seed = args.seed;
  options.threads = args.threads > 0 ? args.threads : 1;

  ManifestBuilder manifest("estimate", args.seed);
  manifest.input(args.panel);
  const PanelDataset panel = load_panel_file(args.panel);
  const EstimateResult result = estimate_irf(panel, options);

  fs::create_directories(args.out);
  json summary;
  summary["alpha"] = options.alpha;
  summary["bootstrap"] = options.b_draws;
  summary["delta"] = options.delta;
  summary["grid"] = {{"n", options.grid.n}, {"lo", result.grid_lo}, {"hi", result.grid_hi}};
  summary["horizons"] = json::array();
  for (const auto& hr : result.horizons) {
    char name[32];
    std::snprintf(name, sizeof(name), "irf_h%d.csv", hr.horizon);
    write_text(fs::path(args.out) / name, irf_curve_csv(hr.curve));
    manifest.output(fs::path(args.out) / name);
    json h = selection_to_json(hr.selection);
    h["h"] = hr.horizon;
    h["hac_lag"] = hr.hac_lag;
    h["critical_value"] = hr.curve.critical_value;
    h["n"] = hr.fit.n;
    summary["horizons"].push_back(h);
  }
  write_text(fs::path(args.out) / "summary.json", summary.dump(2) + "\n");
  manifest.output(fs::path(args.out) / "summary.json");
  manifest.write(args.out);
  std::cout << "estimate: wrote " << result.horizons.size() << " horizon curve(s) to " << args.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

McConfig parse_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  McConfig config;
  std::string line;
  long line_no = 0;
  auto parse_int_list = [](const std::string& v) {
    std::vector<int> out;
    std::istringstream s(v);
    std::string tok;
    while (std::getline(s, tok, ',')) out.push_back(std::stoi(tok));
    return out;
  };
  auto parse_double_list = [](const std::string& v) {
    std::vector<double> out;
    std::istringstream s(v);
    std::string tok;
    while (std::getline(s, tok, ',')) out.push_back(std::stod(tok));
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t'))
      line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "dgp") {
        const int k = std::stoi(value);
        if (k < 1 || k > 3) throw ConfigError("dgp must be 1, 2 or 3");
        config.dgp.kind = k == 1 ? DgpKind::Dgp1 : (k == 2 ? DgpKind::Dgp2 : DgpKind::Dgp3);
      } else if (key == "g") {
        if (value == "cubic") config.dgp.g = GKind::Cubic;
        else if (value == "fourier") config.dgp.g = GKind::Fourier;
        else if (value == "custom") config.dgp.g = GKind::Custom;
        else throw ConfigError("g must be cubic, fourier or custom");
      } else if (key == "g_coef") {
        const auto coefs = parse_double_list(value);
        config.dgp.custom_coef =
            Eigen::Map<const Eigen::VectorXd>(coefs.data(), static_cast<Eigen::Index>(coefs.size()));
      } else if (key == "rho") {
        config.dgp.rho = std::stod(value);
      } else if (key == "burn_in") {
        config.dgp.burn_in = std::stoi(value);
      } else if (key == "reps") {
        config.reps = std::stoi(value);
      } else if (key == "n") {
        config.n_list = parse_int_list(value);
      } else if (key == "t") {
        config.t_list = parse_int_list(value);
      } else if (key == "horizons") {
        config.horizons = parse_int_list(value);
      } else if (key == "deltas") {
        config.deltas = parse_double_list(value);
      } else if (key == "selectors") {
        config.selectors.clear();
        std::istringstream s(value);
        std::string tok;
        while (std::getline(s, tok, ',')) config.selectors.push_back(parse_selector(tok));
      } else if (key == "oracle_j") {
        config.oracle_j = std::stoi(value);
      } else if (key == "j_lasso") {
        config.j_lasso = std::stoi(value);
      } else if (key == "b") {
        config.b_draws = std::stoi(value);
      } else if (key == "alpha") {
        config.alpha = std::stod(value);
      } else if (key == "rimse_grid") {
        GridSpec g = parse_grid(value);
        config.rimse_grid_n = g.n;
        if (g.lo) config.rimse_lo = *g.lo;
        if (g.hi) config.rimse_hi = *g.hi;
      } else if (key == "band_grid") {
        config.band_grid_n = std::stoi(value);
      } else if (key == "intermediate") {
        config.with_intermediate = parse_on_off(value, key);
      } else if (key == "linear") {
        config.linear_benchmark = parse_on_off(value, key);
      } else if (key == "bands") {
        config.bands = parse_on_off(value, key);
      } else if (key == "mode") {
        config.mode = parse_mode(value);
      } else if (key == "seed") {
        config.seed = std::stoull(value);
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(line_no) + ": bad value for key '" + key + "'");
    }
  }
  return config;
}

std::string rimse_csv(const McResult& result) {
  std::ostringstream out;
  out << "n,t,h,delta,estimator,rimse\n";
  for (const auto& cell : result.rimse)
    out << cell.n_units << ',' << cell.n_periods << ',' << cell.horizon << ','
        << format_result(cell.delta) << ',' << cell.estimator << ',' << format_result(cell.value)
        << '\n';
  return out.str();
}

std::string coverage_csv(const McResult& result) {
  std::ostringstream out;
  out << "selector,n,t,h,coverage,mean_width,reps_used\n";
  for (const auto& cell : result.coverage)
    out << cell.selector << ',' << cell.n_units << ',' << cell.n_periods << ',' << cell.horizon
        << ',' << format_result(cell.coverage) << ',' << format_result(cell.mean_width) << ','
        << cell.reps_used << '\n';
  return out.str();
}

std::string replications_csv(const McResult& result) {
  std::ostringstream out;
  out << "cell,rep,n,t,h,estimator,j_hat,band_covers,band_width,failed,error\n";
  for (const auto& r : result.records)
    out << r.cell << ',' << r.rep << ',' << r.n_units << ',' << r.n_periods << ',' << r.horizon
        << ',' << r.estimator << ',' << r.j_hat << ',' << (r.band_covers ? 1 : 0) << ','
        << format_result(r.band_width) << ',' << (r.failed ? 1 : 0) << ',' << r.error << '\n';
  return out.str();
}

int run_simulate(const std::string& config_path, const std::string& out_dir, int threads,
                 std::uint64_t seed_override, bool has_seed) {
  McConfig config = parse_study_config(config_path);
  if (threads > 0) config.threads = threads;
  if (has_seed) config.seed = seed_override;

  ManifestBuilder manifest("simulate", config.seed);
  manifest.input(config_path);
  const McResult result = run_study(config);

  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "rimse.csv", rimse_csv(result));
  write_text(fs::path(out_dir) / "coverage.csv", coverage_csv(result));
  write_text(fs::path(out_dir) / "replications.csv", replications_csv(result));
  manifest.output(fs::path(out_dir) / "rimse.csv");
  manifest.output(fs::path(out_dir) / "coverage.csv");
  manifest.output(fs::path(out_dir) / "replications.csv");
  manifest.doc["failures"] = result.failures;
  manifest.doc["replications"] = result.replications;
  manifest.write(out_dir);
  std::cout << "simulate: " << result.replications << " replication(s), " << result.failures
            << " failure(s); tables in " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose-linear

int run_diagnose(const std::string& panel_path, bool analytic, const std::string& grid_spec,
                 const std::string& gprime_kind, const std::string& out_dir) {
  ManifestBuilder manifest("diagnose-linear", 0);
  fs::create_directories(out_dir);

  GridSpec grid_opt = parse_grid(grid_spec);
  Eigen::VectorXd grid, omega, gprime;
  json summary;

  std::function<double(double)> gprime_fn;
  bool have_gprime = false;
  if (analytic || gprime_kind == "example") {
    gprime_fn = gprime_analytic_example;
    have_gprime = true;
  } else if (gprime_kind == "cubic") {
    gprime_fn = [](double z) { return 0.5 + 0.6 * z - 0.75 * z * z; };
    have_gprime = true;
  } else if (gprime_kind != "none") {
    throw ConfigError("--gprime must be none, cubic or example");
  }

  if (analytic) {
    const double lo = grid_opt.lo.value_or(1.0);
    const double hi = grid_opt.hi.value_or(3.0);
    grid = linspace(lo, hi, grid_opt.n);
    omega.resize(grid.size());
    for (Eigen::Index m = 0; m < grid.size(); ++m) omega[m] = omega_analytic_example(grid[m]);
    const QuadratureResult beta = linear_estimand(omega_analytic_example, gprime_fn, lo, hi);
    const QuadratureResult mass =
        adaptive_simpson([](double z) { return omega_analytic_example(z); }, lo, hi, 1e-10);
    summary["beta"] = beta.value;
    summary["beta_quadrature_error"] = beta.error_estimate;
    summary["omega_integral"] = mass.value;
    std::vector<double> sign_changes;
    for (Eigen::Index m = 1; m < grid.size(); ++m)
      if ((omega[m - 1] < 0.0) != (omega[m] < 0.0))
        sign_changes.push_back(0.5 * (grid[m - 1] + grid[m]));
    summary["omega_sign_changes"] = sign_changes;
  } else {
    manifest.input(panel_path);
    const PanelDataset panel = load_panel_file(panel_path);
    // Pool (Z_{i,t-1}, X_t) over base times t = 2..T.
    const int n = panel.n_units();
    const int t_len = panel.n_periods();
    Eigen::VectorXd z(static_cast<long>(n) * (t_len - 1)), x(static_cast<long>(n) * (t_len - 1));
    long r = 0;
    for (int p = 1; p < t_len; ++p)
      for (int i = 0; i < n; ++i, ++r) {
        z[r] = panel.state(i, p - 1);
        x[r] = panel.shock[p];
      }
    const double lo = grid_opt.lo.value_or(z.minCoeff());
    const double hi = grid_opt.hi.value_or(z.maxCoeff());
    grid = linspace(lo, hi, grid_opt.n);
    const WeightCurve curve = omega_empirical(z, x, grid);
    omega = curve.omega;
    summary["omega_integral"] = curve.integral;
    summary["omega_sign_changes"] = curve.sign_changes;
    if (have_gprime) summary["beta"] = linear_estimand(curve, gprime_fn);
  }

  std::ostringstream csv;
  csv << "z,omega,gprime,integrand\n";
  for (Eigen::Index m = 0; m < grid.size(); ++m) {
    csv << format_result(grid[m]) << ',' << format_result(omega[m]) << ',';
    if (have_gprime) {
      const double gp = gprime_fn(grid[m]);
      csv << format_result(gp) << ',' << format_result(omega[m] * gp);
    } else {
      csv << ',';
    }
    csv << '\n';
  }
  write_text(fs::path(out_dir) / "weight_curve.csv", csv.str());
  manifest.output(fs::path(out_dir) / "weight_curve.csv");
  write_text(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  manifest.output(fs::path(out_dir) / "summary.json");
  manifest.write(out_dir);

  if (summary.contains("beta"))
    std::cout << "diagnose-linear: beta = " << summary["beta"].get<double>()
              << " (integral of omega = " << summary["omega_integral"].get<double>() << ")\n";
  else
    std::cout << "diagnose-linear: integral of omega = "
              << summary["omega_integral"].get<double>() << "\n";
  if (summary.contains("omega_sign_changes") && !summary["omega_sign_changes"].empty())
    std::cout << "  omega changes sign within the domain; the linear slope mixes"
                 " opposing derivative regions\n";
  return 0;
}

// ---------------------------------------------------------------------------
// aggregate

struct AggregateArgs {
  EstimateArgs est;
  std::string weights;
  int horizon = 0;
  bool weights_as_control = false;
};

int run_aggregate(const AggregateArgs& args) {
  ManifestBuilder manifest("aggregate", args.est.seed);
  manifest.input(args.est.panel);
  PanelDataset panel = load_panel_file(args.est.panel);

  int weight_col = -1;
  for (int k = 0; k < panel.n_controls(); ++k)
    if (panel.control_names[k] == args.weights) weight_col = k;
  if (weight_col < 0)
    throw ConfigError("weights column '" + args.weights + "' not found in the panel");
  const Eigen::MatrixXd weight_matrix = panel.controls[weight_col];
  if (!args.weights_as_control) {
    panel.controls.erase(panel.controls.begin() + weight_col);
    panel.control_names.erase(panel.control_names.begin() + weight_col);
  }

  EstimateOptions options;
  options.horizons = {args.horizon};
  options.selector = parse_selector(args.est.selector);
  if (options.selector == Selector::Oracle) {
    if (args.est.oracle_j == 0) throw ConfigError("selector 'oracle' requires --oracle-j");
    options.oracle_j = args.est.oracle_j;
  }
  options.alpha = args.est.alpha;
  options.b_draws = args.est.bootstrap;
  options.grid = parse_grid(args.est.grid);
  options.mode = parse_mode(args.est.mode);
  options.with_intermediate = parse_on_off(args.est.intermediate, "--intermediate");
  options.seed = args.est.seed;
  const EstimateResult est = estimate_irf(panel, options);
  const LpFit& fit = est.horizons[0].fit;

  std::vector<long long> periods;
  std::vector<Eigen::VectorXd> states, weights;
  for (int p = 1; p < panel.n_periods(); ++p) {
    periods.push_back(panel.time_index[p]);
    states.push_back(panel.state.col(p - 1));
    weights.push_back(weight_matrix.col(p - 1));
  }
  const AggregateResponse agg = aggregate_response(fit, periods, states, weights);

  fs::create_directories(args.est.out);
  std::ostringstream csv;
  csv << "time,response,response_ma4\n";
  for (size_t p = 0; p < agg.periods.size(); ++p) {
    csv << agg.periods[p] << ',' << format_result(agg.response[p]) << ',';
    if (std::isfinite(agg.response_ma4[p])) csv << format_result(agg.response_ma4[p]);
    csv << '\n';
  }
  write_text(fs::path(args.est.out) / "aggregate.csv", csv.str());
  manifest.output(fs::path(args.est.out) / "aggregate.csv");
  manifest.doc["horizon"] = args.horizon;
  manifest.doc["j_hat"] = est.horizons[0].selection.j_hat;
  manifest.write(args.est.out);
  std::cout << "aggregate: wrote per-period responsiveness for " << agg.periods.size()
            << " period(s) to " << args.est.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sieve local projections for state-dependent impulse responses"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand("estimate", "Estimate IRF curves from a panel CSV");
  cmd_est->add_option("panel", est.panel, "panel CSV file")->required();
  cmd_est->add_option("--horizons", est.horizons, "horizons, e.g. 0,4,8 or 0..4");
  cmd_est->add_option("--selector", est.selector, "aic|gcv|lasso|oracle");
  cmd_est->add_option("--oracle-j", est.oracle_j, "fixed dimension for selector=oracle");
  cmd_est->add_option("--alpha", est.alpha, "band level (default 0.05)");
  cmd_est->add_option("--bootstrap", est.bootstrap, "bootstrap draws B");
  cmd_est->add_option("--grid", est.grid, "evaluation grid n or n:lo:hi");
  cmd_est->add_option("--mode", est.mode, "level|cum-t|cum-t1");
  cmd_est->add_option("--intermediate", est.intermediate, "on|off");
  cmd_est->add_option("--delta", est.delta, "shock size");
  cmd_est->add_option("--seed", est.seed, "bootstrap seed");
  cmd_est->add_option("--threads", est.threads, "worker threads")
      ->envname("STATE_LP_THREADS");
  cmd_est->add_option("--out", est.out, "output directory");

  std::string sim_config, sim_out = ".";
  int sim_threads = 0;
  std::uint64_t sim_seed = 0;
  auto* cmd_sim = app.add_subcommand("simulate", "Run the replication study from a config file");
  cmd_sim->add_option("config", sim_config, "study configuration file")->required();
  cmd_sim->add_option("--out", sim_out, "output directory");
  cmd_sim->add_option("--threads", sim_threads, "worker threads")->envname("STATE_LP_THREADS");
  auto* sim_seed_opt = cmd_sim->add_option("--seed", sim_seed, "override the config seed");

  std::string diag_panel, diag_grid = "500", diag_gprime = "none", diag_out = ".";
  bool diag_analytic = false;
  auto* cmd_diag =
      app.add_subcommand("diagnose-linear", "Weight curve behind the linear-interaction slope");
  cmd_diag->add_option("--panel", diag_panel, "panel CSV file");
  cmd_diag->add_flag("--analytic-example", diag_analytic, "run the closed-form example");
  cmd_diag->add_option("--grid", diag_grid, "grid n or n:lo:hi");
  cmd_diag->add_option("--gprime", diag_gprime,
                       "derivative to integrate against: none|cubic|example");
  cmd_diag->add_option("--out", diag_out, "output directory");

  AggregateArgs agg;
  auto* cmd_agg =
      app.add_subcommand("aggregate", "Weighted cross-sectional responsiveness per period");
  cmd_agg->add_option("panel", agg.est.panel, "panel CSV file")->required();
  cmd_agg->add_option("--weights", agg.weights, "weights column (e.g. capital stock)")->required();
  cmd_agg->add_option("--horizon", agg.horizon, "horizon of the fitted response");
  cmd_agg->add_flag("--weights-as-control", agg.weights_as_control,
                    "keep the weights column among the regression controls");
  cmd_agg->add_option("--selector", agg.est.selector, "aic|gcv|lasso|oracle");
  cmd_agg->add_option("--oracle-j", agg.est.oracle_j, "fixed dimension for selector=oracle");
  cmd_agg->add_option("--alpha", agg.est.alpha, "band level");
  cmd_agg->add_option("--bootstrap", agg.est.bootstrap, "bootstrap draws B");
  cmd_agg->add_option("--grid", agg.est.grid, "evaluation grid n or n:lo:hi");
  cmd_agg->add_option("--mode", agg.est.mode, "level|cum-t|cum-t1");
  cmd_agg->add_option("--intermediate", agg.est.intermediate, "on|off");
  cmd_agg->add_option("--seed", agg.est.seed, "bootstrap seed");
  cmd_agg->add_option("--out", agg.est.out, "output directory");

  try {
    app.parse(argc, argv);
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_sim->parsed())
      return run_simulate(sim_config, sim_out, sim_threads, sim_seed, sim_seed_opt->count() > 0);
    if (cmd_diag->parsed()) {
      if (!diag_analytic && diag_panel.empty())
        throw ConfigError("diagnose-linear needs --panel or --analytic-example");
      return run_diagnose(diag_panel, diag_analytic, diag_grid, diag_gprime, diag_out);
    }
    if (cmd_agg->parsed()) return run_aggregate(agg);
    return 3;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
