#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pcecv/errors.hpp"

namespace pcecv {

// Shortest decimal representation that parses back to the same double.
// Locale-independent by construction.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view cell, const std::string& where) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw DataError(where + ": invalid number '" + std::string(cell) + "'");
  return v;
}

inline long long parse_int(std::string_view cell, const std::string& where) {
  long long v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw DataError(where + ": invalid integer '" + std::string(cell) + "'");
  return v;
}

// Line-oriented CSV emitter. Cells must not contain separators or line
// breaks (no quoting dialect); raw lines bypass the cell checks for
// comment/label rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path)
      : path_(path.string()), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot open '" + path_ + "' for writing");
  }

  void line(std::string_view raw) {
    out_.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    out_.put('\n');
  }

  void row(const std::vector<std::string>& cells) {
    std::string joined;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\n\r") != std::string::npos)
        throw DataError("CSV cell with separator characters: '" + cells[i] +
                        "'");
      if (i) joined.push_back(',');
      joined += cells[i];
    }
    line(joined);
  }

  void close() {
    out_.flush();
    if (!out_) throw DataError("write failure on '" + path_ + "'");
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

// A parsed CSV file: a header row, data rows, and any leading '#' comment
// lines. `row_lines` keeps the original 1-based line number of each data
// row for error reporting.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return cells;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open '" + path.string() + "' for reading");
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.comments.push_back(line);
      continue;
    }
    auto cells = split_csv_line(line);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size())
      throw DataError(path.string() + " line " + std::to_string(line_no) +
                      ": expected " + std::to_string(table.header.size()) +
                      " columns, found " + std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
    table.row_lines.push_back(line_no);
  }
  if (!have_header)
    throw DataError(path.string() + ": missing header row");
  return table;
}

}  // namespace pcecv
