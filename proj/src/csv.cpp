#include "chiral/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace chiral {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void CsvBlock::add_meta(std::string key, std::string value) {
  const auto bad = [](char ch) { return ch == ' ' || ch == '\t' || ch == '\n' || ch == '='; };
  for (char ch : key) {
    if (bad(ch)) throw std::invalid_argument("CSV metadata key contains a separator: " + key);
  }
  for (char ch : value) {
    if (ch == ' ' || ch == '\t' || ch == '\n') {
      throw std::invalid_argument("CSV metadata value contains whitespace: " + value);
    }
  }
  metadata.emplace_back(std::move(key), std::move(value));
}

void CsvBlock::add_meta(std::string key, double value) {
  add_meta(std::move(key), format_double(value));
}

std::string CsvBlock::meta(std::string_view key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return {};
}

std::size_t CsvBlock::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::out_of_range("no CSV column named " + std::string(name));
}

std::vector<double> CsvBlock::column(std::string_view name) const {
  const std::size_t idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(idx));
  return out;
}

void write_csv(std::ostream& out, const std::vector<CsvBlock>& blocks) {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const CsvBlock& block = blocks[b];
    if (b > 0) out << '\n';
    out << '#';
    for (const auto& [k, v] : block.metadata) out << ' ' << k << '=' << v;
    out << '\n';
    for (std::size_t i = 0; i < block.columns.size(); ++i) {
      out << (i ? "," : "") << block.columns[i];
    }
    out << '\n';
    for (const auto& row : block.rows) {
      if (row.size() != block.columns.size()) {
        throw std::invalid_argument("CSV row width does not match header");
      }
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << (i ? "," : "") << format_double(row[i]);
      }
      out << '\n';
    }
  }
}

std::string to_csv_string(const std::vector<CsvBlock>& blocks) {
  std::ostringstream out;
  write_csv(out, blocks);
  return out.str();
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_cell(std::string_view cell) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw std::runtime_error("CSV cell is not a number: '" + std::string(cell) + "'");
  }
  return v;
}

}  // namespace

std::vector<CsvBlock> read_csv(std::istream& in) {
  std::vector<CsvBlock> blocks;
  enum class Expect { Meta, Header, Rows } state = Expect::Meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      state = Expect::Meta;
      continue;
    }
    switch (state) {
      case Expect::Meta: {
        if (line.front() != '#') throw std::runtime_error("CSV block must start with '#'");
        CsvBlock block;
        for (const auto& token : split(std::string_view(line).substr(1), ' ')) {
          if (token.empty()) continue;
          const auto eq = token.find('=');
          if (eq == std::string::npos) throw std::runtime_error("bad metadata token: " + token);
          block.metadata.emplace_back(token.substr(0, eq), token.substr(eq + 1));
        }
        blocks.push_back(std::move(block));
        state = Expect::Header;
        break;
      }
      case Expect::Header:
        blocks.back().columns = split(line, ',');
        state = Expect::Rows;
        break;
      case Expect::Rows: {
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) row.push_back(parse_cell(cell));
        if (row.size() != blocks.back().columns.size()) {
          throw std::runtime_error("CSV row width does not match header");
        }
        blocks.back().rows.push_back(std::move(row));
        break;
      }
    }
  }
  return blocks;
}

std::vector<CsvBlock> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_csv(in);
}

}  // namespace chiral
