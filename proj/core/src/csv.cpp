#include "soilspec/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "soilspec/error.hpp"

namespace soilspec {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file: " + path);

  CsvTable table;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (first) {
      table.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != table.header.size()) {
      std::ostringstream msg;
      msg << path << ": row " << (table.rows.size() + 1) << " has " << cells.size()
          << " cells, header has " << table.header.size();
      throw Error(msg.str());
    }
    table.rows.push_back(std::move(cells));
  }
  require(!first, path + ": empty file, expected a header row");
  return table;
}

double parse_double_cell(const std::string& cell, std::size_t row_index,
                         const std::string& column_name) {
  double v = 0.0;
  const std::string trimmed = trim(cell);
  const char* begin = trimmed.data();
  const char* end = begin + trimmed.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || trimmed.empty()) {
    std::ostringstream msg;
    msg << "non-numeric cell '" << cell << "' in column '" << column_name << "', row "
        << row_index;
    throw Error(msg.str());
  }
  return v;
}

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path, std::ios::binary);
  require(impl_->out.good(), "cannot open file for writing: " + path);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) impl_->out << ',';
    impl_->out << cells[i];
  }
  impl_->out << '\n';
}

}  // namespace soilspec
