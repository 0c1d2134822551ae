#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace recmerit {

inline constexpr int kHoursPerYear = 8760;
inline constexpr int kHoursPerDay = 24;

// Italian day-ahead market bidding zones.
enum class Zone { NORD, CNORD, CSUD, CALA, SUD, SICI, SARD };

inline constexpr std::array<Zone, 7> kAllZones = {
    Zone::NORD, Zone::CNORD, Zone::CSUD, Zone::CALA,
    Zone::SUD,  Zone::SICI,  Zone::SARD};

// REC member categories that own generation. Standalone plants carry no load.
enum class Category { Public, Residential, SME, NPO, Standalone };

inline constexpr std::array<Category, 5> kAllCategories = {
    Category::Public, Category::Residential, Category::SME, Category::NPO,
    Category::Standalone};

inline std::string_view to_string(Zone z) {
  switch (z) {
    case Zone::NORD: return "NORD";
    case Zone::CNORD: return "CNORD";
    case Zone::CSUD: return "CSUD";
    case Zone::CALA: return "CALA";
    case Zone::SUD: return "SUD";
    case Zone::SICI: return "SICI";
    case Zone::SARD: return "SARD";
  }
  return "?";
}

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::Public: return "Public";
    case Category::Residential: return "Residential";
    case Category::SME: return "SME";
    case Category::NPO: return "NPO";
    case Category::Standalone: return "Standalone";
  }
  return "?";
}

inline std::optional<Zone> parse_zone(std::string_view s) {
  for (Zone z : kAllZones)
    if (s == to_string(z)) return z;
  return std::nullopt;
}

inline std::optional<Category> parse_category(std::string_view s) {
  for (Category c : kAllCategories)
    if (s == to_string(c)) return c;
  return std::nullopt;
}

// Bad run configuration or unusable input file (maps to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data discovered while processing (exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A derived statistic together with the number of observations behind it.
// sample_size == 0 marks an empty selection; value is then meaningless.
struct Stat {
  double value = 0.0;
  int sample_size = 0;

  bool present() const { return sample_size > 0; }
};

}  // namespace recmerit
