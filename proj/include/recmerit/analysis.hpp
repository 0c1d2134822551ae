#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recmerit/calendar.hpp"
#include "recmerit/types.hpp"

namespace recmerit {

enum class DayType { all, weekday, weekend };

// Which quantity sits in the denominator of the percentage difference. The
// counterfactual no-REC volume is the default baseline.
enum class DiffBaseline { synthetic, actual };

struct ImpactEntry {
  int hour_index = 0;  // 1..8760
  std::optional<double> q_actual;
  std::optional<double> q_synt;
  std::optional<double> p_actual;
  std::optional<double> p_synt;
  std::optional<double> rel_diff_pct;  // undefined entries stay absent
  std::optional<double> rel_diff_smoothed_pct;
};

struct ImpactSeries {
  Zone zone = Zone::NORD;
  std::string scenario_code;
  int market_year = 2024;
  std::vector<ImpactEntry> entries;  // one per processed hour, ascending
};

struct SmoothingConfig {
  int window = 7;             // odd, >= 3
  bool positive_only = true;  // entries <= 0 pass through untouched
};

inline std::optional<double> relative_diff(
    double actual, double synthetic,
    DiffBaseline baseline = DiffBaseline::synthetic) {
  double denom = baseline == DiffBaseline::synthetic ? synthetic : actual;
  if (denom <= 0.0) return std::nullopt;
  return 100.0 * (actual - synthetic) / denom;
}

// Centered simple moving average applied once, reading neighbors from the
// original series. Non-positive entries and the (window-1)/2 edge entries on
// each side keep their original values.
inline std::vector<double> smooth(const std::vector<double>& series,
                                  const SmoothingConfig& config) {
  if (config.window < 3 || config.window % 2 == 0)
    throw DataError("smooth: window must be odd and >= 3");
  std::vector<double> out = series;
  const int half = config.window / 2;
  const int n = static_cast<int>(series.size());
  for (int i = half; i < n - half; ++i) {
    if (config.positive_only && series[i] <= 0.0) continue;
    double sum = 0.0;
    for (int j = i - half; j <= i + half; ++j) sum += series[j];
    out[i] = sum / config.window;
  }
  return out;
}

// Mean over selected days for each settlement hour 1..24. The market year
// fixes the weekday mapping; month 0 = all months.
inline std::array<double, 24> hourly_profile_mean(
    const std::vector<std::pair<int, double>>& hour_values,  // (t, value)
    int market_year, int month = 0, DayType day_type = DayType::all) {
  std::array<double, 24> sums{};
  std::array<int, 24> counts{};
  for (const auto& [t, v] : hour_values) {
    int m, d, h;
    from_hour_index(t, m, d, h);
    if (month != 0 && m != month) continue;
    if (day_type != DayType::all) {
      bool we = is_weekend(market_year, m, d);
      if ((day_type == DayType::weekend) != we) continue;
    }
    sums[h - 1] += v;
    ++counts[h - 1];
  }
  std::array<double, 24> out{};
  bool any = false;
  for (int h = 0; h < 24; ++h) {
    if (counts[h] == 0) continue;
    out[h] = sums[h] / counts[h];
    any = true;
  }
  if (!any) throw DataError("hourly_profile_mean: empty selection");
  return out;
}

// Mean of the defined relative differences within one calendar month.
inline double monthly_average_impact(const ImpactSeries& series, int month,
                                     bool smoothed = false) {
  double sum = 0.0;
  int n = 0;
  for (const auto& e : series.entries) {
    int m, d, h;
    from_hour_index(e.hour_index, m, d, h);
    if (m != month) continue;
    const auto& v = smoothed ? e.rel_diff_smoothed_pct : e.rel_diff_pct;
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0)
    throw DataError("monthly_average_impact: no defined entries in month " +
                    std::to_string(month));
  return sum / n;
}

// Fills rel_diff columns in place from the equilibrium pairs.
inline void compute_impact(ImpactSeries& series, const SmoothingConfig& cfg,
                           DiffBaseline baseline = DiffBaseline::synthetic) {
  for (auto& e : series.entries) {
    if (e.q_actual && e.q_synt)
      e.rel_diff_pct = relative_diff(*e.q_actual, *e.q_synt, baseline);
    else
      e.rel_diff_pct.reset();
  }
  // Smoothing runs over a dense vector; undefined entries contribute 0 to
  // their neighbors' windows and stay undefined themselves.
  std::vector<double> dense(series.entries.size(), 0.0);
  for (size_t i = 0; i < series.entries.size(); ++i)
    if (series.entries[i].rel_diff_pct)
      dense[i] = *series.entries[i].rel_diff_pct;
  std::vector<double> smoothed = smooth(dense, cfg);
  for (size_t i = 0; i < series.entries.size(); ++i) {
    if (series.entries[i].rel_diff_pct)
      series.entries[i].rel_diff_smoothed_pct = smoothed[i];
    else
      series.entries[i].rel_diff_smoothed_pct.reset();
  }
}

}  // namespace recmerit
