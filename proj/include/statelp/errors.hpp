#pragma once

#include <stdexcept>
#include <string>

namespace statelp {

// Error taxonomy. The three base classes map onto the CLI exit codes:
// InputError -> 1, NumericError -> 2, ConfigError -> 3.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IngestError : InputError {
  long row;
  std::string column;
  IngestError(long row_, std::string column_, const std::string& what_)
      : InputError("ingest error at row " + std::to_string(row_) + ", column '" + column_ +
                   "': " + what_),
        row(row_),
        column(std::move(column_)) {}
};

struct ShockInconsistency : InputError {
  long long period;
  explicit ShockInconsistency(long long period_)
      : InputError("shock value differs across units in period " + std::to_string(period_)),
        period(period_) {}
};

struct BalanceError : InputError {
  using InputError::InputError;
};

struct HorizonError : InputError {
  using InputError::InputError;
};

struct BasisError : InputError {
  using InputError::InputError;
};

struct DesignError : InputError {
  using InputError::InputError;
};

struct DomainError : InputError {
  using InputError::InputError;
};

struct MetricError : InputError {
  using InputError::InputError;
};

struct AggregationError : InputError {
  long long period;
  explicit AggregationError(long long period_)
      : InputError("all weights are zero in period " + std::to_string(period_)), period(period_) {}
};

struct RankError : NumericError {
  using NumericError::NumericError;
};

struct ConvergenceError : NumericError {
  using NumericError::NumericError;
};

struct SelectionError : NumericError {
  using NumericError::NumericError;
};

struct HacError : NumericError {
  using NumericError::NumericError;
};

struct NumericalError : NumericError {
  using NumericError::NumericError;
};

struct DegenerateError : NumericError {
  using NumericError::NumericError;
};

struct QuadratureError : NumericError {
  using NumericError::NumericError;
};

struct StudyError : NumericError {
  using NumericError::NumericError;
};

}  // namespace statelp
