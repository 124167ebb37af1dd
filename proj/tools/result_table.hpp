#pragma once

#include <string>
#include <vector>

namespace chsbs_cli {

struct ResultRow {
  std::string state;
  std::string quantity;
  double parameter = 0.0;  // abscissa where one applies (T, reduced t); NaN otherwise
  double value = 0.0;
  double uncertainty = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int points = 0;
  std::string provenance;  // library operation that produced the row
  std::string note;

  bool operator==(const ResultRow&) const;
};

struct ResultTable {
  std::string command;
  std::string unit;  // energy unit of temperatures and vertices
  std::vector<ResultRow> rows;
};

inline constexpr const char* kSchemaVersion = "1.0";

const std::vector<std::string>& csv_header();

// RFC 4180: CRLF records, fields quoted when they hold ',', '"', CR or LF; 17 significant digits.
std::string to_csv(const ResultTable& t);
// Inverse of to_csv for the row data.
std::vector<ResultRow> parse_csv(const std::string& text);

std::string to_json(const ResultTable& t, const std::string& config_text);

// gnuplot command file plotting the named CSV.
std::string to_plot_script(const ResultTable& t, const std::string& csv_name);

// Writes the table in the requested format under dir; returns the files written.
// Throws std::runtime_error when a file cannot be written.
std::vector<std::string> emit(const ResultTable& t, const std::string& format, const std::string& dir,
                              const std::string& config_text);

}  // namespace chsbs_cli
