#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace statelp {

/// Column-name mapping for panel CSV ingestion. When auto_controls is set and
/// `controls` is empty, every column not otherwise mapped is treated as a
/// control, in header order.
struct PanelSchema {
  std::string unit = "unit";
  std::string time = "time";
  std::string outcome = "y";
  std::string shock = "x";
  std::string state = "z";
  std::vector<std::string> controls;
  bool auto_controls = true;
};

/// Balanced micro-macro panel: N units observed over T common periods, with a
/// single aggregate shock value per period. Immutable after construction;
/// safe to share read-only across threads.
struct PanelDataset {
  std::vector<std::string> unit_ids;     // N, sorted
  std::vector<long long> time_index;     // T, strictly increasing
  Eigen::MatrixXd outcome;               // N x T
  Eigen::VectorXd shock;                 // T
  Eigen::MatrixXd state;                 // N x T
  std::vector<Eigen::MatrixXd> controls; // Q matrices, each N x T
  std::vector<std::string> control_names;

  int n_units() const { return static_cast<int>(unit_ids.size()); }
  int n_periods() const { return static_cast<int>(time_index.size()); }
  int n_controls() const { return static_cast<int>(controls.size()); }
};

PanelDataset load_panel(std::istream& source, const PanelSchema& schema = {});
PanelDataset load_panel_file(const std::string& path, const PanelSchema& schema = {});

/// Emit the documented CSV format (unit,time,y,x,z,controls...). Numeric cells
/// are printed with enough digits that reloading reproduces the panel
/// bit-exactly.
void write_panel(const PanelDataset& panel, std::ostream& out);

enum class OutcomeMode { Level, CumulativeFromT, CumulativeFromTMinus1 };

/// Horizon-aligned estimation sample. Rows are laid out time-major: all N
/// units at the first base time, then all N at the next, etc. Base times are
/// 1-based period positions and run 2..T-h, the maximal window on which both
/// the lagged state and the horizon-h outcome exist.
struct RegressionSample {
  int horizon = 0;
  OutcomeMode mode = OutcomeMode::Level;
  bool with_intermediate = false;
  int n_units = 0;
  std::vector<int> base_times;    // 1-based positions, ascending
  Eigen::VectorXd response;       // n
  Eigen::VectorXd state_at_base;  // n, Z_{i,t-1}
  Eigen::VectorXd shock_at_base;  // n, X_t
  Eigen::MatrixXd future_shock;   // n x h: X_{t+s}, s = 1..h (empty unless with_intermediate)
  Eigen::MatrixXd future_state;   // n x h: Z_{i,t+s-1}
  Eigen::MatrixXd controls;       // n x Q, W_{i,t-1}

  long rows() const { return response.size(); }
  int n_times() const { return static_cast<int>(base_times.size()); }
};

RegressionSample build_regression_sample(const PanelDataset& panel, int horizon, OutcomeMode mode,
                                         bool with_intermediate);

}  // namespace statelp
