#pragma once

#include <string>
#include <vector>

namespace soilspec {

/// Shortest round-trip decimal rendering of a double (locale independent).
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by exact header name, -1 if absent.
  int column(const std::string& name) const;
};

/// Reads a comma-separated file with a header row. UTF-8, LF or CRLF.
/// Every row must have exactly as many cells as the header.
CsvTable read_csv(const std::string& path);

/// Strict double parse of a cell (surrounding spaces allowed).
double parse_double_cell(const std::string& cell, std::size_t row_index,
                         const std::string& column_name);

class CsvWriter {
public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write_row(const std::vector<std::string>& cells);

private:
  struct Impl;
  Impl* impl_;
};

}  // namespace soilspec
