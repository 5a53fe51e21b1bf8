#include "mcpd/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace mcpd::csv {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || text.empty()) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return value;
}

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find_first_of(",\"\r\n") != std::string::npos) {
      throw std::invalid_argument("field needs quoting, which this format "
                                  "does not use: '" + fields[i] + "'");
    }
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::invalid_argument("no column named '" + name + "'");
}

double Table::number(std::size_t row, std::size_t col) const {
  return parse_double(rows.at(row).at(col));
}

Table read_table(std::istream& is) {
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw std::runtime_error("ragged csv row: '" + line + "'");
    }
    table.rows.push_back(std::move(fields));
  }
  if (first) {
    throw std::runtime_error("csv input has no header row");
  }
  return table;
}

Table read_table_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot open " + path);
  }
  return read_table(is);
}

}  // namespace mcpd::csv
