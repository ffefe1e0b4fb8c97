#include "statelp/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "statelp/csv.hpp"
#include "statelp/errors.hpp"

namespace statelp {

namespace {

int require_column(const CsvTable& table, const std::string& name) {
  const int idx = table.column(name);
  if (idx < 0) throw InputError("missing required column '" + name + "'");
  return idx;
}

}  // namespace

PanelDataset load_panel(std::istream& source, const PanelSchema& schema) {
  const CsvTable table = read_csv(source);
  const int unit_col = require_column(table, schema.unit);
  const int time_col = require_column(table, schema.time);
  const int y_col = require_column(table, schema.outcome);
  const int x_col = require_column(table, schema.shock);
  const int z_col = require_column(table, schema.state);

  std::vector<std::pair<std::string, int>> control_cols;
  if (!schema.controls.empty()) {
    for (const auto& name : schema.controls) control_cols.emplace_back(name, require_column(table, name));
  } else if (schema.auto_controls) {
    for (size_t i = 0; i < table.header.size(); ++i) {
      const int idx = static_cast<int>(i);
      if (idx == unit_col || idx == time_col || idx == y_col || idx == x_col || idx == z_col)
        continue;
      control_cols.emplace_back(table.header[i], idx);
    }
  }
  const int q = static_cast<int>(control_cols.size());

  struct Cell {
    double y, x, z;
    std::vector<double> w;
  };
  std::map<std::string, std::map<long long, Cell>> cells;
  std::vector<long long> all_times;

  long row_no = 1;  // header is row 1
  for (const auto& row : table.rows) {
    ++row_no;
    if (row.size() != table.header.size())
      throw IngestError(row_no, "-", "expected " + std::to_string(table.header.size()) +
                                         " fields, got " + std::to_string(row.size()));
    const std::string& unit = row[unit_col];
    if (unit.empty()) throw IngestError(row_no, schema.unit, "empty unit id");
    const long long t = parse_integer(row[time_col], row_no, schema.time);
    Cell cell;
    cell.y = parse_double(row[y_col], row_no, schema.outcome);
    cell.x = parse_double(row[x_col], row_no, schema.shock);
    cell.z = parse_double(row[z_col], row_no, schema.state);
    if (!std::isfinite(cell.y)) throw IngestError(row_no, schema.outcome, "non-finite value");
    if (!std::isfinite(cell.x)) throw IngestError(row_no, schema.shock, "non-finite value");
    if (!std::isfinite(cell.z)) throw IngestError(row_no, schema.state, "non-finite value");
    cell.w.reserve(q);
    for (const auto& [name, idx] : control_cols) {
      const double v = parse_double(row[idx], row_no, name);
      if (!std::isfinite(v)) throw IngestError(row_no, name, "non-finite value");
      cell.w.push_back(v);
    }
    auto [it, inserted] = cells[unit].emplace(t, std::move(cell));
    if (!inserted)
      throw BalanceError("duplicate observation for unit '" + unit + "' at period " +
                         std::to_string(t));
    all_times.push_back(t);
  }

  if (cells.empty()) throw BalanceError("panel has no data rows");

  std::sort(all_times.begin(), all_times.end());
  all_times.erase(std::unique(all_times.begin(), all_times.end()), all_times.end());

  // Balance check: every unit must cover exactly the common period set.
  std::string missing;
  int n_missing = 0;
  for (const auto& [unit, by_time] : cells) {
    for (long long t : all_times) {
      if (by_time.count(t)) continue;
      ++n_missing;
      if (n_missing <= 10) missing += " (" + unit + "," + std::to_string(t) + ")";
    }
  }
  if (n_missing > 0)
    throw BalanceError("unbalanced panel, " + std::to_string(n_missing) + " missing cells:" +
                       missing + (n_missing > 10 ? " ..." : ""));

  PanelDataset panel;
  for (const auto& [unit, by_time] : cells) panel.unit_ids.push_back(unit);
  panel.time_index = all_times;
  const int n = panel.n_units();
  const int t_len = panel.n_periods();
  if (t_len < 2) throw BalanceError("panel needs at least 2 periods, got " + std::to_string(t_len));

  panel.outcome.resize(n, t_len);
  panel.state.resize(n, t_len);
  panel.shock.resize(t_len);
  panel.controls.assign(q, Eigen::MatrixXd(n, t_len));
  for (const auto& [name, idx] : control_cols) panel.control_names.push_back(name);

  for (int ti = 0; ti < t_len; ++ti) {
    const long long t = all_times[ti];
    bool first = true;
    for (int i = 0; i < n; ++i) {
      const Cell& cell = cells[panel.unit_ids[i]].at(t);
      panel.outcome(i, ti) = cell.y;
      panel.state(i, ti) = cell.z;
      for (int k = 0; k < q; ++k) panel.controls[k](i, ti) = cell.w[k];
      if (first) {
        panel.shock[ti] = cell.x;
        first = false;
      } else if (cell.x != panel.shock[ti]) {
        throw ShockInconsistency(t);
      }
    }
  }
  return panel;
}

PanelDataset load_panel_file(const std::string& path, const PanelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open panel file '" + path + "'");
  return load_panel(in, schema);
}

void write_panel(const PanelDataset& panel, std::ostream& out) {
  out << "unit,time,y,x,z";
  for (const auto& name : panel.control_names) out << ',' << name;
  out << '\n';
  for (int i = 0; i < panel.n_units(); ++i) {
    for (int ti = 0; ti < panel.n_periods(); ++ti) {
      out << panel.unit_ids[i] << ',' << panel.time_index[ti] << ','
          << format_double(panel.outcome(i, ti)) << ',' << format_double(panel.shock[ti]) << ','
          << format_double(panel.state(i, ti));
      for (const auto& w : panel.controls) out << ',' << format_double(w(i, ti));
      out << '\n';
    }
  }
}

RegressionSample build_regression_sample(const PanelDataset& panel, int horizon, OutcomeMode mode,
                                         bool with_intermediate) {
  if (horizon < 0) throw HorizonError("horizon must be nonnegative");
  const int n = panel.n_units();
  const int t_len = panel.n_periods();
  // Base positions p (0-based) need the lagged state at p-1 and the response
  // at p+h, so p runs 1..T-1-h.
  const int first = 1;
  const int last = t_len - 1 - horizon;
  if (last < first)
    throw HorizonError("horizon " + std::to_string(horizon) + " leaves no usable base times (T=" +
                       std::to_string(t_len) + ")");

  RegressionSample sample;
  sample.horizon = horizon;
  sample.mode = mode;
  sample.with_intermediate = with_intermediate && horizon >= 1;
  sample.n_units = n;
  const int windows = last - first + 1;
  const long rows = static_cast<long>(n) * windows;
  const int q = panel.n_controls();

  sample.base_times.reserve(windows);
  sample.response.resize(rows);
  sample.state_at_base.resize(rows);
  sample.shock_at_base.resize(rows);
  sample.controls.resize(rows, q);
  if (sample.with_intermediate) {
    sample.future_shock.resize(rows, horizon);
    sample.future_state.resize(rows, horizon);
  }

  long r = 0;
  for (int p = first; p <= last; ++p) {
    sample.base_times.push_back(p + 1);  // 1-based position
    for (int i = 0; i < n; ++i, ++r) {
      double y = panel.outcome(i, p + horizon);
      if (mode == OutcomeMode::CumulativeFromT) y -= panel.outcome(i, p);
      if (mode == OutcomeMode::CumulativeFromTMinus1) y -= panel.outcome(i, p - 1);
      sample.response[r] = y;
      sample.state_at_base[r] = panel.state(i, p - 1);
      sample.shock_at_base[r] = panel.shock[p];
      for (int k = 0; k < q; ++k) sample.controls(r, k) = panel.controls[k](i, p - 1);
      if (sample.with_intermediate) {
        for (int s = 1; s <= horizon; ++s) {
          sample.future_shock(r, s - 1) = panel.shock[p + s];
          sample.future_state(r, s - 1) = panel.state(i, p + s - 1);
        }
      }
    }
  }
  return sample;
}

}  // namespace statelp
