#pragma once

// CSV output: each block is a single '#'-prefixed metadata line of key=value
// pairs, a column header, then numeric rows. Blocks are separated by one blank
// line. Numbers use the shortest round-trip representation, so reading a file
// back and writing it again reproduces it byte for byte.

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chiral {

std::string format_double(double value);

struct CsvBlock {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(std::string key, std::string value);
  void add_meta(std::string key, double value);
  // Value for key, or empty string.
  std::string meta(std::string_view key) const;
  std::size_t column_index(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;
};

void write_csv(std::ostream& out, const std::vector<CsvBlock>& blocks);
std::string to_csv_string(const std::vector<CsvBlock>& blocks);
std::vector<CsvBlock> read_csv(std::istream& in);
std::vector<CsvBlock> parse_csv(std::string_view text);

}  // namespace chiral
