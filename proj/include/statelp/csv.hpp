#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace statelp {

/// Minimal CSV support for the documented numeric formats: comma separator,
/// one header row, UTF-8, '.' decimal point, no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(std::istream& in);

/// Double formatted with up to 17 significant digits; parses back bit-exactly.
std::string format_double(double v);

/// Compact fixed-precision format for result tables (deterministic).
std::string format_result(double v);

double parse_double(const std::string& cell, long row, const std::string& column);
long long parse_integer(const std::string& cell, long row, const std::string& column);

}  // namespace statelp
