#pragma once

#include <cstdio>
#include <optional>
#include <string>

#include "recmerit/types.hpp"

namespace recmerit {

// All profile math runs on a fixed 8,760-hour non-leap calendar aligned to the
// market year. Ledger rows dated Feb 29 of a leap market year do not map onto
// this grid and are skipped upstream.

inline constexpr int kDaysPerMonth[12] = {31, 28, 31, 30, 31, 30,
                                          31, 31, 30, 31, 30, 31};

struct CivilDate {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;    // 1..31
};

// Day-of-year for a non-leap calendar, 1-based. Returns nullopt for Feb 29
// and other dates outside the 365-day grid.
inline std::optional<int> day_of_year(int month, int day) {
  if (month < 1 || month > 12 || day < 1 || day > kDaysPerMonth[month - 1])
    return std::nullopt;
  int doy = day;
  for (int m = 0; m < month - 1; ++m) doy += kDaysPerMonth[m];
  return doy;
}

// hour = 1..24 settlement period; returns t in 1..8760.
inline std::optional<int> hour_index(int month, int day, int hour) {
  if (hour < 1 || hour > 24) return std::nullopt;
  auto doy = day_of_year(month, day);
  if (!doy) return std::nullopt;
  return (*doy - 1) * 24 + hour;
}

// Inverse of hour_index for t in 1..8760.
inline void from_hour_index(int t, int& month, int& day, int& hour) {
  int doy = (t - 1) / 24 + 1;
  hour = (t - 1) % 24 + 1;
  month = 1;
  while (doy > kDaysPerMonth[month - 1]) {
    doy -= kDaysPerMonth[month - 1];
    ++month;
  }
  day = doy;
}

// Howard Hinnant's days-from-civil; proleptic Gregorian.
inline long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

// 0 = Monday ... 6 = Sunday.
inline int weekday(int y, int m, int d) {
  long z = days_from_civil(y, m, d);
  return static_cast<int>((z >= -3 ? (z + 3) % 7 : (z + 4) % 7 + 6));
}

// Saturday + Sunday; public holidays are not folded in.
inline bool is_weekend(int y, int m, int d) { return weekday(y, m, d) >= 5; }

inline std::string format_date(int year, int month, int day) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

// Parses "YYYY-MM-DD". Returns nullopt on malformed input.
inline std::optional<CivilDate> parse_date(const std::string& s) {
  CivilDate d;
  char extra = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%d%c", &d.year, &d.month, &d.day, &extra) != 3)
    return std::nullopt;
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return std::nullopt;
  return d;
}

}  // namespace recmerit
