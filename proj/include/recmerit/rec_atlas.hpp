#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "recmerit/csv.hpp"
#include "recmerit/types.hpp"

namespace recmerit {

enum class RecStatus { operational, design };

// One mapped REC as read from the registry. Optional fields stay absent when
// the source cell is empty; absence is never collapsed to zero.
struct RecRecord {
  std::string id;
  Zone zone = Zone::NORD;
  RecStatus status = RecStatus::operational;
  std::optional<double> pv_capacity_kwp;
  std::map<Category, double> category_shares;          // percent of REC capacity
  std::map<Category, double> rooftop_counts;           // installations per category
  std::map<Category, std::vector<std::string>> building_types;
  std::optional<double> self_consumption_pct;
  std::optional<bool> has_bess;
};

struct ZonalShares {
  std::map<Zone, double> shares_pct;
  int total_recs = 0;
};

struct CategoryZoneParams {
  Category category = Category::Public;
  Zone zone = Zone::NORD;
  Stat avg_total_capacity_kwp;
  Stat avg_unit_capacity_kwp;
  Stat avg_units_per_rec;  // country-level average by default
  int sample_size = 0;
};

// Which registry rows enter the statistics. The full registry is the
// default basis; operational-only backs bottom-up deployment estimates.
enum class StatusFilter { all, operational_only };

namespace detail {

inline const char* share_column(Category c) {
  switch (c) {
    case Category::Public: return "share_public_pct";
    case Category::Residential: return "share_residential_pct";
    case Category::SME: return "share_sme_pct";
    case Category::NPO: return "share_npo_pct";
    case Category::Standalone: return "share_standalone_pct";
  }
  return "";
}

inline const char* rooftop_column(Category c) {
  switch (c) {
    case Category::Public: return "n_rooftop_public";
    case Category::Residential: return "n_rooftop_residential";
    case Category::SME: return "n_rooftop_sme";
    case Category::NPO: return "n_rooftop_npo";
    case Category::Standalone: return "n_standalone";
  }
  return "";
}

inline const char* building_column(Category c) {
  switch (c) {
    case Category::Public: return "building_types_public";
    case Category::Residential: return "building_types_residential";
    case Category::SME: return "building_types_sme";
    case Category::NPO: return "building_types_npo";
    default: return "";
  }
}

// A REC "includes" category p only when its share is present and > 0;
// an explicit 0 reads as absence.
inline bool includes_category(const RecRecord& r, Category c) {
  auto it = r.category_shares.find(c);
  return it != r.category_shares.end() && it->second > 0.0;
}

inline bool passes(const RecRecord& r, StatusFilter f) {
  return f == StatusFilter::all || r.status == RecStatus::operational;
}

}  // namespace detail

inline std::vector<RecRecord> load_rec_registry(const std::string& path) {
  csv::Table t(path);
  t.require_columns({"id", "zone", "status", "pv_capacity_kwp"}, path);
  if (t.row_count() == 0) throw DataError("registry has no data rows: " + path);

  std::vector<RecRecord> records;
  records.reserve(t.row_count());
  for (size_t i = 0; i < t.row_count(); ++i) {
    const size_t line_no = i + 2;  // 1-based, after header
    RecRecord rec;
    rec.id = t.cell(i, "id");

    std::string zs = t.cell(i, "zone");
    auto zone = parse_zone(zs);
    if (!zone) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": unknown zone label '" << zs << "'";
      throw DataError(msg.str());
    }
    rec.zone = *zone;

    std::string st = t.cell(i, "status");
    if (st == "operational")
      rec.status = RecStatus::operational;
    else if (st == "design")
      rec.status = RecStatus::design;
    else
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": unknown status '" + st + "'");

    auto num = [&](const char* col) -> std::optional<double> {
      std::string cell = t.cell(i, col);
      if (cell.empty()) return std::nullopt;
      auto v = csv::parse_double(cell);
      if (!v)
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": malformed numeric in column '" + col + "': " + cell);
      return v;
    };

    rec.pv_capacity_kwp = num("pv_capacity_kwp");
    if (rec.pv_capacity_kwp && *rec.pv_capacity_kwp < 0)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": negative pv_capacity_kwp");

    for (Category c : kAllCategories) {
      if (auto v = num(detail::share_column(c))) {
        if (*v < 0 || *v > 100)
          throw DataError(path + ":" + std::to_string(line_no) +
                          ": category share out of [0,100]");
        rec.category_shares[c] = *v;
      }
      if (auto v = num(detail::rooftop_column(c))) rec.rooftop_counts[c] = *v;
      const char* bcol = detail::building_column(c);
      if (*bcol) {
        std::string cell = t.cell(i, bcol);
        if (!cell.empty()) {
          std::vector<std::string> labels;
          for (auto& part : csv::split(cell, ';')) {
            auto s = csv::strip(part);
            if (!s.empty()) labels.push_back(s);
          }
          if (!labels.empty()) rec.building_types[c] = std::move(labels);
        }
      }
    }

    rec.self_consumption_pct = num("self_consumption_pct");
    std::string bess = t.cell(i, "has_bess");
    if (!bess.empty()) rec.has_bess = (bess == "1" || bess == "yes" || bess == "true");

    records.push_back(std::move(rec));
  }
  return records;
}

inline ZonalShares zonal_shares(const std::vector<RecRecord>& records,
                                StatusFilter filter = StatusFilter::all) {
  ZonalShares out;
  std::map<Zone, int> counts;
  for (Zone z : kAllZones) counts[z] = 0;
  for (const auto& r : records)
    if (detail::passes(r, filter)) {
      ++counts[r.zone];
      ++out.total_recs;
    }
  if (out.total_recs == 0) throw DataError("zonal_shares: no records selected");
  for (Zone z : kAllZones)
    out.shares_pct[z] = 100.0 * counts[z] / out.total_recs;
  return out;
}

// Mean over RECs containing the category of capacity * share / 100.
inline Stat avg_total_capacity(const std::vector<RecRecord>& records,
                               Category category, Zone zone,
                               StatusFilter filter = StatusFilter::all) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (!detail::passes(r, filter)) continue;
    if (r.zone != zone || !detail::includes_category(r, category)) continue;
    if (!r.pv_capacity_kwp) continue;
    sum += *r.pv_capacity_kwp * r.category_shares.at(category) / 100.0;
    ++n;
  }
  return n ? Stat{sum / n, n} : Stat{};
}

inline Stat avg_capacity_share(const std::vector<RecRecord>& records,
                               Category category, Zone zone,
                               StatusFilter filter = StatusFilter::all) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (!detail::passes(r, filter)) continue;
    if (r.zone != zone || !detail::includes_category(r, category)) continue;
    sum += r.category_shares.at(category);
    ++n;
  }
  return n ? Stat{sum / n, n} : Stat{};
}

// Country-wide mean number of rooftop/standalone installations per REC.
inline Stat avg_units_per_rec(const std::vector<RecRecord>& records,
                              Category category,
                              StatusFilter filter = StatusFilter::all,
                              std::optional<Zone> per_zone = std::nullopt) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (!detail::passes(r, filter)) continue;
    if (per_zone && r.zone != *per_zone) continue;
    auto it = r.rooftop_counts.find(category);
    if (it == r.rooftop_counts.end()) continue;
    sum += it->second;
    ++n;
  }
  return n ? Stat{sum / n, n} : Stat{};
}

inline double avg_unit_capacity(double avg_total_capacity_kwp,
                                double avg_units_per_rec) {
  if (avg_units_per_rec <= 0.0)
    throw DataError("avg_unit_capacity: avg_units_per_rec must be > 0");
  return avg_total_capacity_kwp / avg_units_per_rec;
}

inline std::string most_common_building_type(
    const std::vector<RecRecord>& records, Category category,
    StatusFilter filter = StatusFilter::all) {
  std::map<std::string, int> counts;
  for (const auto& r : records) {
    if (!detail::passes(r, filter)) continue;
    auto it = r.building_types.find(category);
    if (it == r.building_types.end()) continue;
    for (const auto& label : it->second) ++counts[label];
  }
  if (counts.empty())
    throw DataError(std::string("no building-type data for category ") +
                    std::string(to_string(category)));
  // std::map iterates labels lexicographically, so the first max wins ties.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

inline Stat mean_self_consumption_pct(const std::vector<RecRecord>& records,
                                      StatusFilter filter = StatusFilter::all) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (!detail::passes(r, filter) || !r.self_consumption_pct) continue;
    sum += *r.self_consumption_pct;
    ++n;
  }
  return n ? Stat{sum / n, n} : Stat{};
}

// Full per-(category, zone) parameter table used by the projection stage.
inline std::vector<CategoryZoneParams> derive_params(
    const std::vector<RecRecord>& records,
    StatusFilter filter = StatusFilter::all, bool units_per_zone = false) {
  std::vector<CategoryZoneParams> out;
  for (Category c : kAllCategories) {
    Stat country_units = avg_units_per_rec(records, c, filter);
    for (Zone z : kAllZones) {
      CategoryZoneParams p;
      p.category = c;
      p.zone = z;
      p.avg_total_capacity_kwp = avg_total_capacity(records, c, z, filter);
      p.avg_units_per_rec =
          units_per_zone ? avg_units_per_rec(records, c, filter, z)
                         : country_units;
      p.sample_size = p.avg_total_capacity_kwp.sample_size;
      if (p.avg_total_capacity_kwp.present() && p.avg_units_per_rec.present() &&
          p.avg_units_per_rec.value > 0) {
        p.avg_unit_capacity_kwp =
            Stat{avg_unit_capacity(p.avg_total_capacity_kwp.value,
                                   p.avg_units_per_rec.value),
                 p.sample_size};
      }
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace recmerit
