#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "recmerit/types.hpp"

namespace recmerit::csv {

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

inline std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::optional<double> parse_double(const std::string& raw) {
  std::string s = strip(raw);
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  const char* end = begin + s.size();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

inline std::optional<long> parse_long(const std::string& raw) {
  std::string s = strip(raw);
  if (s.empty()) return std::nullopt;
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Header-indexed reader for the delimiter-separated tables used throughout.
// List-valued cells (building types) use ';' as the inner separator so the
// outer delimiter never needs quoting.
class Table {
 public:
  Table(const std::string& path, char delim = ',') : delim_(delim) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    header_ = split(strip_bom(line), delim_);
    for (size_t i = 0; i < header_.size(); ++i)
      index_[strip(header_[i])] = i;
    while (std::getline(in, line)) {
      if (strip(line).empty()) continue;
      rows_.push_back(split(line, delim_));
    }
  }

  const std::vector<std::string>& header() const { return header_; }
  size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& row(size_t i) const { return rows_[i]; }

  bool has_column(const std::string& name) const {
    return index_.count(name) > 0;
  }

  // Missing column or missing cell both read as empty.
  std::string cell(size_t row, const std::string& col) const {
    auto it = index_.find(col);
    if (it == index_.end()) return {};
    const auto& r = rows_[row];
    if (it->second >= r.size()) return {};
    return strip(r[it->second]);
  }

  void require_columns(const std::vector<std::string>& cols,
                       const std::string& path) const {
    for (const auto& c : cols)
      if (!has_column(c))
        throw DataError("file " + path + ": missing required column '" + c + "'");
  }

 private:
  static std::string strip_bom(std::string s) {
    if (s.size() >= 3 && s[0] == '\xEF' && s[1] == '\xBB' && s[2] == '\xBF')
      s.erase(0, 3);
    return s;
  }

  char delim_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::unordered_map<std::string, size_t> index_;
};

}  // namespace recmerit::csv
