#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdreg {

// Minimal comma-separated table: one header row, numeric or plain cells,
// no quoting. Cells are stored trimmed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // index of a header column, -1 if absent
  int column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in, const std::string& origin);
CsvTable read_csv_file(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);
std::string trim(const std::string& s);

// throws ParseError naming origin, column and 1-based file line
double parse_double_cell(const std::string& cell, const std::string& column,
                         std::size_t file_line, const std::string& origin);

// shortest representation that round-trips exactly
std::string format_double(double value);

}  // namespace fdreg
