#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "recmerit/profiles.hpp"
#include "recmerit/rec_atlas.hpp"
#include "recmerit/types.hpp"

namespace recmerit {

// Named deployment trajectory. sc_targets is uniform across categories for
// the main scenarios and per-category for the mixed ones; Standalone never
// carries a target.
struct Scenario {
  std::string code;
  int year = 2027;
  double total_capacity_gw = 0.0;
  std::map<Category, double> sc_targets;  // fraction in (0, 1]
  bool includes_standalone = true;
  bool policy_target_achieving = false;
};

struct AllocationCell {
  Category category = Category::Public;
  Zone zone = Zone::NORD;
  double allocated_capacity_kwp = 0.0;
  double plant_count = 0.0;  // fractional by design; a scaling device
};

struct FleetAllocation {
  std::vector<AllocationCell> cells;
  double share_shortfall_pct = 0.0;  // |100 - sum of category shares|, worst zone

  const AllocationCell* find(Category c, Zone z) const {
    for (const auto& cell : cells)
      if (cell.category == c && cell.zone == z) return &cell;
    return nullptr;
  }
};

struct ZonalSeries {
  Zone zone = Zone::NORD;
  HourlyProfile export_mwh;
  HourlyProfile self_mwh;
};

inline std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  auto uniform = [](std::string code, double gw, double sc, bool policy) {
    Scenario s;
    s.code = std::move(code);
    s.total_capacity_gw = gw;
    for (Category c : kAllCategories)
      if (c != Category::Standalone) s.sc_targets[c] = sc;
    s.policy_target_achieving = policy;
    return s;
  };
  out.push_back(uniform("sc45.2027", 5.0, 0.45, true));
  out.push_back(uniform("sc50.2027", 5.0, 0.50, true));
  out.push_back(uniform("sc55.2027", 5.0, 0.55, true));
  out.push_back(uniform("sc45.HW.2027", 1.47, 0.45, false));
  out.push_back(uniform("sc50.HW.2027", 1.47, 0.50, false));
  out.push_back(uniform("sc55.HW.2027", 1.47, 0.55, false));
  out.push_back(uniform("sc45.BU.2027", 0.119, 0.45, false));
  out.push_back(uniform("sc50.BU.2027", 0.119, 0.50, false));
  out.push_back(uniform("sc55.BU.2027", 0.119, 0.55, false));

  // Mixed scenarios: per-category targets, no standalone contribution. The
  // source table leaves their capacity column blank; both default to the
  // 5 GW policy total and the value stays configurable.
  Scenario mix1;
  mix1.code = "sc_mix1.2027";
  mix1.total_capacity_gw = 5.0;
  mix1.sc_targets = {{Category::Public, 0.50},
                     {Category::Residential, 0.45},
                     {Category::SME, 0.55},
                     {Category::NPO, 0.50}};
  mix1.includes_standalone = false;
  mix1.policy_target_achieving = false;
  out.push_back(mix1);

  Scenario mix2 = mix1;
  mix2.code = "sc_mix2.2027";
  for (auto& [c, t] : mix2.sc_targets) t = 0.55;
  mix2.policy_target_achieving = true;
  out.push_back(mix2);
  return out;
}

inline std::optional<Scenario> find_scenario(const std::vector<Scenario>& all,
                                             const std::string& code) {
  for (const auto& s : all)
    if (s.code == code) return s;
  return std::nullopt;
}

// Splits the scenario total across (category, zone) cells:
//   capacity = total * zone_share% * category_share% / 100^2
//   plant_count = capacity / unit_capacity
// Shares are used as given; when a zone's category shares do not sum to 100
// the shortfall is reported, or optionally renormalized away.
inline FleetAllocation allocate(
    const Scenario& scenario, const ZonalShares& zonal,
    const std::map<std::pair<Category, Zone>, Stat>& capacity_shares,
    const std::map<std::pair<Category, Zone>, Stat>& unit_capacities,
    bool renormalize_shares = false) {
  FleetAllocation out;
  const double total_kwp = scenario.total_capacity_gw * 1e6;

  for (Zone z : kAllZones) {
    double zone_share = 0.0;
    if (auto it = zonal.shares_pct.find(z); it != zonal.shares_pct.end())
      zone_share = it->second;

    double share_sum = 0.0;
    for (Category c : kAllCategories) {
      if (!scenario.includes_standalone && c == Category::Standalone) continue;
      auto it = capacity_shares.find({c, z});
      if (it != capacity_shares.end() && it->second.present())
        share_sum += it->second.value;
    }
    if (zone_share > 0.0)
      out.share_shortfall_pct =
          std::max(out.share_shortfall_pct, std::abs(100.0 - share_sum));

    for (Category c : kAllCategories) {
      if (!scenario.includes_standalone && c == Category::Standalone) continue;
      auto it = capacity_shares.find({c, z});
      double cat_share = (it != capacity_shares.end() && it->second.present())
                             ? it->second.value
                             : 0.0;
      if (renormalize_shares && share_sum > 0.0)
        cat_share = cat_share * 100.0 / share_sum;

      AllocationCell cell;
      cell.category = c;
      cell.zone = z;
      cell.allocated_capacity_kwp =
          total_kwp * zone_share * cat_share / (100.0 * 100.0);
      if (cell.allocated_capacity_kwp > 0.0) {
        auto uc = unit_capacities.find({c, z});
        if (uc == unit_capacities.end() || !uc->second.present() ||
            uc->second.value <= 0.0) {
          std::ostringstream msg;
          msg << "allocate: positive capacity share but no unit capacity for "
              << to_string(c) << "/" << to_string(z);
          throw DataError(msg.str());
        }
        cell.plant_count = cell.allocated_capacity_kwp / uc->second.value;
      }
      out.cells.push_back(cell);
    }
  }
  return out;
}

// One prosumer's kWh profiles scaled by the fleet plant count; the kWh -> MWh
// conversion happens exactly once, here.
struct CategoryZonalSeries {
  Category category = Category::Public;
  Zone zone = Zone::NORD;
  HourlyProfile export_mwh;
  HourlyProfile self_mwh;
};

inline CategoryZonalSeries project_series(const AllocationCell& cell,
                                          const ProsumerEnergy* prosumer) {
  CategoryZonalSeries out;
  out.category = cell.category;
  out.zone = cell.zone;
  out.export_mwh.kind = ProfileKind::export_;
  out.self_mwh.kind = ProfileKind::self;
  if (cell.plant_count == 0.0) {
    out.export_mwh.values.assign(kHoursPerYear, 0.0);
    out.self_mwh.values.assign(kHoursPerYear, 0.0);
    return out;
  }
  if (!prosumer) {
    std::ostringstream msg;
    msg << "project_series: missing prosumer profile for "
        << to_string(cell.category) << "/" << to_string(cell.zone)
        << " with plant_count " << cell.plant_count;
    throw DataError(msg.str());
  }
  const size_t n = prosumer->exported.size();
  out.export_mwh.values.resize(n);
  out.self_mwh.values.resize(n);
  for (size_t t = 0; t < n; ++t) {
    out.export_mwh.values[t] =
        prosumer->exported[t] * cell.plant_count / 1000.0;
    out.self_mwh.values[t] =
        prosumer->self_consumed[t] * cell.plant_count / 1000.0;
  }
  return out;
}

inline ZonalSeries aggregate_zone(
    const std::vector<CategoryZonalSeries>& per_category, Zone zone) {
  ZonalSeries out;
  out.zone = zone;
  out.export_mwh.kind = ProfileKind::export_;
  out.self_mwh.kind = ProfileKind::self;
  out.export_mwh.values.assign(kHoursPerYear, 0.0);
  out.self_mwh.values.assign(kHoursPerYear, 0.0);
  for (const auto& s : per_category) {
    if (s.zone != zone) continue;
    for (size_t t = 0; t < s.export_mwh.size() && t < kHoursPerYear; ++t) {
      out.export_mwh.values[t] += s.export_mwh[t];
      out.self_mwh.values[t] += s.self_mwh[t];
    }
  }
  return out;
}

}  // namespace recmerit
