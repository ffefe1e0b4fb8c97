#include "statelp/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>

#include "statelp/errors.hpp"

namespace statelp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty input: no header row");
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    table.rows.push_back(split_line(line));
  }
  return table;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_result(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double parse_double(const std::string& cell, long row, const std::string& column) {
  if (cell.empty()) throw IngestError(row, column, "empty cell");
  const char* begin = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\t')) ++end;
  if (end == begin || (end && *end != '\0'))
    throw IngestError(row, column, "non-numeric value '" + cell + "'");
  return v;
}

long long parse_integer(const std::string& cell, long row, const std::string& column) {
  if (cell.empty()) throw IngestError(row, column, "empty cell");
  const char* begin = cell.c_str();
  char* end = nullptr;
  long long v = std::strtoll(begin, &end, 10);
  while (end && (*end == ' ' || *end == '\t')) ++end;
  if (end == begin || (end && *end != '\0'))
    throw IngestError(row, column, "non-integer value '" + cell + "'");
  return v;
}

}  // namespace statelp
