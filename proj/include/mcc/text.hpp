#pragma once

// Minimal line-oriented CSV reading with line-numbered diagnostics. Fields are
// plain comma-separated tokens; quoting is not supported.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mcc/error.hpp"

namespace mcc {

inline std::string_view trim(std::string_view s) noexcept {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline void split(std::string_view line, char sep, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
}

class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw InputError("cannot open " + path.string());
  }

  /// Next non-blank line split on commas; false at end of file.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (trim(line_).empty()) continue;
      split(line_, ',', fields);
      return true;
    }
    return false;
  }

  void expect_header(std::initializer_list<std::string_view> names) {
    std::vector<std::string_view> fields;
    std::string want;
    for (auto n : names) want += (want.empty() ? "" : ",") + std::string(n);
    if (!next(fields) || fields.size() != names.size() || !std::equal(names.begin(), names.end(), fields.begin())) {
      fail("expected header '" + want + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw InputError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  std::size_t line() const noexcept { return line_no_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

template <class Reporter>
std::size_t parse_index(std::string_view s, const Reporter& where) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) where.fail("expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

template <class Reporter>
long long parse_integer(std::string_view s, const Reporter& where) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) where.fail("expected an integer, got '" + std::string(s) + "'");
  return v;
}

template <class Reporter>
double parse_real(std::string_view s, const Reporter& where) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) where.fail("expected a number, got '" + std::string(s) + "'");
  return v;
}

}  // namespace mcc
