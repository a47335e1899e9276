#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "railelec/error.hpp"

namespace railelec::csv {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
  s = trim(s);
  if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ValidationError(context + ": expected a number, got '" + std::string(s) + "'");
  return v;
}

inline long parse_long(std::string_view s, const std::string& context) {
  s = trim(s);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw ValidationError(context + ": expected an integer, got '" + std::string(s) + "'");
  return v;
}

inline bool parse_bool(std::string_view s, const std::string& context) {
  s = trim(s);
  if (s == "1" || s == "true" || s == "TRUE" || s == "True" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "FALSE" || s == "False" || s == "no") return false;
  throw ValidationError(context + ": expected a boolean, got '" + std::string(s) + "'");
}

/// Header-addressed CSV table. No quoting: fields never contain commas in these formats.
class Table {
 public:
  static Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return parse(in, path);
  }

  static Table parse(std::istream& in, const std::string& name) {
    Table t;
    t.name_ = name;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      auto fields = split(line);
      if (!have_header) {
        for (std::size_t i = 0; i < fields.size(); ++i) t.index_[fields[i]] = i;
        t.header_ = std::move(fields);
        have_header = true;
        continue;
      }
      if (fields.size() != t.header_.size())
        throw ValidationError(name + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.header_.size()) + " fields, got " +
                              std::to_string(fields.size()));
      t.rows_.push_back(std::move(fields));
      t.lines_.push_back(lineno);
    }
    if (!have_header) throw ValidationError(name + ": missing header");
    return t;
  }

  void require(std::initializer_list<std::string_view> columns) const {
    for (auto c : columns)
      if (!has(c)) throw ValidationError(name_ + ": missing column '" + std::string(c) + "'");
  }

  bool has(std::string_view column) const { return index_.count(std::string(column)) > 0; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  const std::string& at(std::size_t row, std::string_view column) const {
    auto it = index_.find(std::string(column));
    if (it == index_.end()) throw ValidationError(name_ + ": missing column '" + std::string(column) + "'");
    return rows_[row][it->second];
  }

  std::optional<std::string> optional(std::size_t row, std::string_view column) const {
    if (!has(column)) return std::nullopt;
    const auto& v = at(row, column);
    if (v.empty()) return std::nullopt;
    return v;
  }

  std::string where(std::size_t row, std::string_view column) const {
    return name_ + ":" + std::to_string(lines_[row]) + " column '" + std::string(column) + "'";
  }

  double number(std::size_t row, std::string_view column) const {
    return parse_double(at(row, column), where(row, column));
  }
  long integer(std::size_t row, std::string_view column) const {
    return parse_long(at(row, column), where(row, column));
  }
  bool boolean(std::size_t row, std::string_view column) const {
    return parse_bool(at(row, column), where(row, column));
  }

 private:
  std::string name_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;
};

/// Streams comma-joined rows.
class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path) {
    if (!out_) throw ValidationError("cannot write '" + path + "'");
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << to_field(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string to_field(const std::string& s) { return s; }
  static std::string to_field(const char* s) { return s; }
  static std::string to_field(double v) { return format_double(v); }
  template <class I>
    requires std::is_integral_v<I>
  static std::string to_field(I v) { return std::to_string(v); }

  std::ofstream out_;
};

}  // namespace railelec::csv
