#pragma once

// Minimal reader for the two-column CSV files the library exchanges.
// Lines starting with '#' carry provenance and are skipped.

#include <charconv>
#include <cstdio>
#include <initializer_list>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "garchre/error.hpp"

namespace garchre::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::parse, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

/// Shortest representation that reads back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

class CsvReader {
 public:
  CsvReader(std::istream& in, std::initializer_list<std::string_view> header)
      : in_(in), columns_(header.size()) {
    std::vector<std::string_view> fields;
    if (!read_row(fields)) {
      throw Error(ErrorKind::parse, "missing CSV header");
    }
    std::size_t i = 0;
    bool ok = fields.size() == header.size();
    for (auto name : header) {
      if (!ok) break;
      ok = fields[i++] == name;
    }
    if (!ok) {
      std::string expected;
      for (auto name : header) expected += (expected.empty() ? "" : ",") + std::string(name);
      throw Error(ErrorKind::parse,
                  "line " + std::to_string(line_) + ": expected header '" + expected + "'");
    }
  }

  /// Next data row; false at end of input.
  bool next(std::vector<std::string_view>& fields) {
    if (!read_row(fields)) return false;
    if (fields.size() != columns_) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line_) + ": expected " +
                                        std::to_string(columns_) + " fields, got " +
                                        std::to_string(fields.size()));
    }
    return true;
  }

  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  bool read_row(std::vector<std::string_view>& fields) {
    while (std::getline(in_, buffer_)) {
      ++line_;
      std::string_view row = trim(buffer_);
      if (row.empty() || row.front() == '#') continue;
      fields.clear();
      std::size_t start = 0;
      while (true) {
        const auto comma = row.find(',', start);
        fields.push_back(trim(row.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      return true;
    }
    return false;
  }

  std::istream& in_;
  std::size_t columns_;
  std::string buffer_;
  std::size_t line_ = 0;
};

}  // namespace garchre::detail
