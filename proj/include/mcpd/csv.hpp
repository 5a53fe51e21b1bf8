#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcpd::csv {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

// Strict full-token parse; throws std::invalid_argument on anything else.
double parse_double(const std::string& text);

// Comma-joined fields terminated by a line feed. Fields must be free of
// commas, quotes, and line breaks; the writer rejects them.
void write_row(std::ostream& os, const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws when absent.
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

Table read_table(std::istream& is);
Table read_table_file(const std::string& path);

}  // namespace mcpd::csv
