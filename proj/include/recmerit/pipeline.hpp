#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "recmerit/analysis.hpp"
#include "recmerit/digest.hpp"
#include "recmerit/market.hpp"
#include "recmerit/profiles.hpp"
#include "recmerit/projection.hpp"
#include "recmerit/rec_atlas.hpp"
#include "recmerit/types.hpp"

namespace recmerit {

inline constexpr const char* kVersion = "0.1.0";

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RunConfig {
  std::string registry_path;
  std::string yield_dir;   // yield_<ZONE>.csv
  std::string load_dir;    // load_<Category>.csv
  std::string ledger_path;
  std::string output_dir;
  std::string scenario_file;            // optional user-defined scenarios
  std::vector<std::string> scenarios;   // empty = all known
  std::vector<Zone> zones;              // empty = all seven
  int market_year = 2024;
  double price_cap = kDefaultPriceCap;
  double tuning_tolerance = 1e-3;
  double derate_factor = 1.0;
  SmoothingConfig smoothing;
  BidsMode bids_mode = BidsMode::all;
  StatusFilter status_filter = StatusFilter::all;
  SupplyRemoval supply_removal = SupplyRemoval::cheapest_first;
  DiffBaseline diff_baseline = DiffBaseline::synthetic;
  bool renormalize_shares = false;
  bool units_per_zone = false;
  int threads = 1;
};

struct StageReport {
  std::string stage;
  std::map<std::string, long> counters;
  std::vector<std::string> errors;  // per-cell problems; run continues
  double wall_seconds = 0.0;

  bool ok() const { return errors.empty(); }
};

// ---------------------------------------------------------------------------
// Config loading

namespace detail {

inline std::string env_override(const std::string& key) {
  std::string name = "RECMERIT_" + key;
  for (auto& c : name) c = static_cast<char>(std::toupper(c));
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : std::string();
}

template <typename T>
inline void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline void apply_env(RunConfig& cfg) {
  if (auto v = env_override("market_year"); !v.empty()) cfg.market_year = std::stoi(v);
  if (auto v = env_override("price_cap"); !v.empty()) cfg.price_cap = std::stod(v);
  if (auto v = env_override("window"); !v.empty()) cfg.smoothing.window = std::stoi(v);
  if (auto v = env_override("bids"); !v.empty())
    cfg.bids_mode = v == "accepted" ? BidsMode::accepted : BidsMode::all;
  if (auto v = env_override("threads"); !v.empty()) cfg.threads = std::stoi(v);
  if (auto v = env_override("output_dir"); !v.empty()) cfg.output_dir = v;
}

}  // namespace detail

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }

  RunConfig cfg;
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    detail::read_field(p, "registry", cfg.registry_path);
    detail::read_field(p, "yield_dir", cfg.yield_dir);
    detail::read_field(p, "load_dir", cfg.load_dir);
    detail::read_field(p, "ledger", cfg.ledger_path);
    detail::read_field(p, "output_dir", cfg.output_dir);
    detail::read_field(p, "scenario_file", cfg.scenario_file);
  }
  detail::read_field(j, "scenarios", cfg.scenarios);
  detail::read_field(j, "market_year", cfg.market_year);
  detail::read_field(j, "price_cap", cfg.price_cap);
  detail::read_field(j, "tuning_tolerance", cfg.tuning_tolerance);
  detail::read_field(j, "derate_factor", cfg.derate_factor);
  detail::read_field(j, "renormalize_shares", cfg.renormalize_shares);
  detail::read_field(j, "units_per_zone", cfg.units_per_zone);
  detail::read_field(j, "threads", cfg.threads);
  if (j.contains("smoothing")) {
    detail::read_field(j.at("smoothing"), "window", cfg.smoothing.window);
    detail::read_field(j.at("smoothing"), "positive_only",
                       cfg.smoothing.positive_only);
  }
  if (j.contains("zones")) {
    for (const auto& zs : j.at("zones")) {
      auto z = parse_zone(zs.get<std::string>());
      if (!z) throw ConfigError("unknown zone in config: " + zs.get<std::string>());
      cfg.zones.push_back(*z);
    }
  }
  if (j.contains("bids_mode")) {
    std::string m = j.at("bids_mode").get<std::string>();
    if (m == "all")
      cfg.bids_mode = BidsMode::all;
    else if (m == "accepted")
      cfg.bids_mode = BidsMode::accepted;
    else
      throw ConfigError("bids_mode must be 'all' or 'accepted'");
  }
  if (j.contains("status_filter")) {
    std::string m = j.at("status_filter").get<std::string>();
    if (m == "all")
      cfg.status_filter = StatusFilter::all;
    else if (m == "operational_only")
      cfg.status_filter = StatusFilter::operational_only;
    else
      throw ConfigError("status_filter must be 'all' or 'operational_only'");
  }
  if (j.contains("supply_removal")) {
    std::string m = j.at("supply_removal").get<std::string>();
    if (m == "cheapest_first")
      cfg.supply_removal = SupplyRemoval::cheapest_first;
    else if (m == "zero_price_only")
      cfg.supply_removal = SupplyRemoval::zero_price_only;
    else
      throw ConfigError("supply_removal must be 'cheapest_first' or 'zero_price_only'");
  }
  if (j.contains("diff_baseline")) {
    std::string m = j.at("diff_baseline").get<std::string>();
    if (m == "synthetic")
      cfg.diff_baseline = DiffBaseline::synthetic;
    else if (m == "actual")
      cfg.diff_baseline = DiffBaseline::actual;
    else
      throw ConfigError("diff_baseline must be 'synthetic' or 'actual'");
  }
  detail::apply_env(cfg);
  if (cfg.threads < 1) cfg.threads = 1;
  return cfg;
}

inline std::vector<Zone> selected_zones(const RunConfig& cfg) {
  if (cfg.zones.empty())
    return {kAllZones.begin(), kAllZones.end()};
  return cfg.zones;
}

// User-defined scenarios: JSON list with fields matching Scenario.
inline std::vector<Scenario> load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json j;
  in >> j;
  std::vector<Scenario> out;
  for (const auto& e : j) {
    Scenario s;
    s.code = e.at("code").get<std::string>();
    detail::read_field(e, "year", s.year);
    s.total_capacity_gw = e.at("total_capacity_gw").get<double>();
    detail::read_field(e, "includes_standalone", s.includes_standalone);
    for (const auto& [cat_name, target] : e.at("sc_targets").items()) {
      auto c = parse_category(cat_name);
      if (!c || *c == Category::Standalone)
        throw ConfigError("scenario " + s.code + ": bad sc_targets key " + cat_name);
      double t = target.get<double>();
      if (t <= 0.0 || t > 1.0)
        throw ConfigError("scenario " + s.code + ": sc target out of (0,1]");
      s.sc_targets[*c] = t;
    }
    if (s.total_capacity_gw <= 0.0)
      throw ConfigError("scenario " + s.code + ": total_capacity_gw must be > 0");
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Scenario> resolve_scenarios(const RunConfig& cfg) {
  std::vector<Scenario> known = builtin_scenarios();
  if (!cfg.scenario_file.empty())
    for (auto& s : load_scenario_file(cfg.scenario_file)) known.push_back(s);
  if (cfg.scenarios.empty()) return known;
  std::vector<Scenario> out;
  for (const auto& code : cfg.scenarios) {
    auto s = find_scenario(known, code);
    if (!s) throw ConfigError("unknown scenario code: " + code);
    out.push_back(*s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

inline void write_manifest(const RunConfig& cfg, const StageReport& report,
                           const std::vector<std::string>& input_files) {
  json m;
  m["software_version"] = kVersion;
  m["stage"] = report.stage;
  m["wall_seconds"] = report.wall_seconds;
  json cj;
  cj["registry"] = cfg.registry_path;
  cj["yield_dir"] = cfg.yield_dir;
  cj["load_dir"] = cfg.load_dir;
  cj["ledger"] = cfg.ledger_path;
  cj["output_dir"] = cfg.output_dir;
  cj["market_year"] = cfg.market_year;
  cj["price_cap"] = cfg.price_cap;
  cj["tuning_tolerance"] = cfg.tuning_tolerance;
  cj["smoothing_window"] = cfg.smoothing.window;
  cj["bids_mode"] = cfg.bids_mode == BidsMode::all ? "all" : "accepted";
  cj["status_filter"] =
      cfg.status_filter == StatusFilter::all ? "all" : "operational_only";
  cj["renormalize_shares"] = cfg.renormalize_shares;
  cj["diff_baseline"] =
      cfg.diff_baseline == DiffBaseline::synthetic ? "synthetic" : "actual";
  m["config"] = cj;
  json digests = json::object();
  for (const auto& f : input_files)
    if (fs::exists(f)) digests[f] = digest_file(f);
  m["input_digests"] = digests;
  m["counters"] = report.counters;
  m["errors"] = report.errors;

  fs::create_directories(cfg.output_dir);
  std::ofstream out(fs::path(cfg.output_dir) / ("manifest_" + report.stage + ".json"));
  out << m.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Small output helpers. Fixed formatting keeps reruns byte-identical.

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

class Writer {
 public:
  explicit Writer(const fs::path& path) : out_(path) {
    if (!out_) throw ConfigError("cannot write file: " + path.string());
  }
  void line(const std::string& s) { out_ << s << "\n"; }
 private:
  std::ofstream out_;
};

template <typename Fn>
inline void parallel_for(size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }
 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

}  // namespace detail

// ---------------------------------------------------------------------------
// derive: registry -> parameter tables

inline StageReport cmd_derive(const RunConfig& cfg) {
  detail::Stopwatch timer;
  StageReport report;
  report.stage = "derive";
  if (cfg.registry_path.empty() || !fs::exists(cfg.registry_path))
    throw ConfigError("registry path missing or not found: " + cfg.registry_path);

  auto records = load_rec_registry(cfg.registry_path);
  report.counters["registry_rows"] = static_cast<long>(records.size());

  fs::path params = fs::path(cfg.output_dir) / "params";
  fs::create_directories(params);

  ZonalShares shares = zonal_shares(records, cfg.status_filter);
  {
    detail::Writer w(params / "zonal_shares.csv");
    w.line("zone,share_pct,total_recs");
    for (Zone z : kAllZones)
      w.line(std::string(to_string(z)) + "," + detail::fmt(shares.shares_pct.at(z)) +
             "," + std::to_string(shares.total_recs));
  }

  auto cells = derive_params(records, cfg.status_filter, cfg.units_per_zone);
  auto write_stat = [&](const char* file, auto getter) {
    detail::Writer w(params / file);
    w.line("category,zone,value,sample_size");
    for (const auto& c : cells) {
      Stat s = getter(c);
      w.line(std::string(to_string(c.category)) + "," +
             std::string(to_string(c.zone)) + "," +
             (s.present() ? detail::fmt(s.value) : std::string()) + "," +
             std::to_string(s.sample_size));
    }
  };
  write_stat("avg_total_capacity.csv",
             [](const CategoryZoneParams& c) { return c.avg_total_capacity_kwp; });
  write_stat("avg_unit_capacity.csv",
             [](const CategoryZoneParams& c) { return c.avg_unit_capacity_kwp; });
  write_stat("avg_units_per_rec.csv",
             [](const CategoryZoneParams& c) { return c.avg_units_per_rec; });
  {
    detail::Writer w(params / "avg_capacity_share.csv");
    w.line("category,zone,value,sample_size");
    for (Category c : kAllCategories)
      for (Zone z : kAllZones) {
        Stat s = avg_capacity_share(records, c, z, cfg.status_filter);
        w.line(std::string(to_string(c)) + "," + std::string(to_string(z)) + "," +
               (s.present() ? detail::fmt(s.value) : std::string()) + "," +
               std::to_string(s.sample_size));
      }
  }
  {
    detail::Writer w(params / "building_types.csv");
    w.line("category,most_common_building_type");
    for (Category c : kAllCategories) {
      if (c == Category::Standalone) continue;
      std::string label;
      try {
        label = most_common_building_type(records, c, cfg.status_filter);
      } catch (const DataError&) {
        // No building-type data for this category; cell stays empty.
      }
      w.line(std::string(to_string(c)) + "," + label);
    }
  }
  {
    Stat sc = mean_self_consumption_pct(records, cfg.status_filter);
    detail::Writer w(params / "summary.csv");
    w.line("statistic,value,sample_size");
    w.line("mean_self_consumption_pct," +
           (sc.present() ? detail::fmt(sc.value) : std::string()) + "," +
           std::to_string(sc.sample_size));
  }

  report.wall_seconds = timer.seconds();
  write_manifest(cfg, report, {cfg.registry_path});
  return report;
}

// ---------------------------------------------------------------------------
// simulate: parameter tables + yield/load inputs -> zonal series

namespace detail {

inline std::map<std::pair<Category, Zone>, Stat> read_stat_table(
    const fs::path& path) {
  csv::Table t(path.string());
  t.require_columns({"category", "zone", "value", "sample_size"}, path.string());
  std::map<std::pair<Category, Zone>, Stat> out;
  for (size_t i = 0; i < t.row_count(); ++i) {
    auto c = parse_category(t.cell(i, "category"));
    auto z = parse_zone(t.cell(i, "zone"));
    if (!c || !z) throw DataError(path.string() + ": bad category/zone row");
    Stat s;
    auto n = csv::parse_long(t.cell(i, "sample_size"));
    s.sample_size = n ? static_cast<int>(*n) : 0;
    if (auto v = csv::parse_double(t.cell(i, "value"))) s.value = *v;
    out[{*c, *z}] = s;
  }
  return out;
}

inline ZonalShares read_zonal_shares(const fs::path& path) {
  csv::Table t(path.string());
  t.require_columns({"zone", "share_pct", "total_recs"}, path.string());
  ZonalShares out;
  for (size_t i = 0; i < t.row_count(); ++i) {
    auto z = parse_zone(t.cell(i, "zone"));
    auto v = csv::parse_double(t.cell(i, "share_pct"));
    auto n = csv::parse_long(t.cell(i, "total_recs"));
    if (!z || !v) throw DataError(path.string() + ": bad row");
    out.shares_pct[*z] = *v;
    if (n) out.total_recs = static_cast<int>(*n);
  }
  return out;
}

}  // namespace detail

inline StageReport cmd_simulate(const RunConfig& cfg) {
  detail::Stopwatch timer;
  StageReport report;
  report.stage = "simulate";

  fs::path params = fs::path(cfg.output_dir) / "params";
  if (!fs::exists(params / "zonal_shares.csv"))
    throw ConfigError("parameter tables not found; run derive first: " +
                      params.string());

  ZonalShares shares = detail::read_zonal_shares(params / "zonal_shares.csv");
  auto capacity_shares = detail::read_stat_table(params / "avg_capacity_share.csv");
  auto unit_capacities = detail::read_stat_table(params / "avg_unit_capacity.csv");

  std::vector<Scenario> scenarios = resolve_scenarios(cfg);
  std::vector<Zone> zones = selected_zones(cfg);

  // Yield profiles per zone; load profiles per category.
  std::map<Zone, HourlyProfile> yields;
  for (Zone z : zones) {
    fs::path p = fs::path(cfg.yield_dir) / ("yield_" + std::string(to_string(z)) + ".csv");
    if (!fs::exists(p)) throw ConfigError("missing yield file: " + p.string());
    yields[z] = load_profile_file(p.string(), "yield_kwh_per_kwp",
                                  ProfileKind::yield_per_kwp);
  }
  std::map<Category, HourlyProfile> loads;
  for (Category c : kAllCategories) {
    if (c == Category::Standalone) continue;
    fs::path p = fs::path(cfg.load_dir) / ("load_" + std::string(to_string(c)) + ".csv");
    if (!fs::exists(p)) throw ConfigError("missing load file: " + p.string());
    loads[c] = load_profile_file(p.string(), "load_kwh", ProfileKind::load);
  }

  fs::path profiles_dir = fs::path(cfg.output_dir) / "profiles";
  fs::path series_dir = fs::path(cfg.output_dir) / "series";
  fs::create_directories(profiles_dir);
  fs::create_directories(series_dir);

  // Tuned prosumers are shared between scenarios with the same (category,
  // zone, target) cell.
  std::map<std::tuple<Category, Zone, int>, ProsumerEnergy> prosumer_cache;
  auto prosumer_for = [&](Category c, Zone z,
                          std::optional<double> target) -> const ProsumerEnergy* {
    int key = target ? static_cast<int>(std::lround(*target * 1000)) : -1;
    auto it = prosumer_cache.find({c, z, key});
    if (it != prosumer_cache.end()) return &it->second;
    auto uc = unit_capacities.find({c, z});
    if (uc == unit_capacities.end() || !uc->second.present()) return nullptr;
    ProsumerEnergy pe;
    if (c == Category::Standalone)
      pe = build_prosumer(c, z, yields.at(z), std::nullopt, uc->second.value,
                          std::nullopt, cfg.tuning_tolerance, cfg.derate_factor);
    else
      pe = build_prosumer(c, z, yields.at(z), loads.at(c), uc->second.value,
                          target, cfg.tuning_tolerance, cfg.derate_factor);
    auto [pos, _] = prosumer_cache.emplace(std::make_tuple(c, z, key), std::move(pe));
    return &pos->second;
  };

  long files_written = 0;
  for (const auto& scenario : scenarios) {
    FleetAllocation alloc;
    try {
      alloc = allocate(scenario, shares, capacity_shares, unit_capacities,
                       cfg.renormalize_shares);
    } catch (const DataError& e) {
      report.errors.push_back("scenario " + scenario.code + ": " + e.what());
      continue;
    }
    for (Zone z : zones) {
      std::vector<CategoryZonalSeries> per_category;
      bool cell_failed = false;
      for (Category c : kAllCategories) {
        const AllocationCell* cell = alloc.find(c, z);
        if (!cell) continue;
        const ProsumerEnergy* pe = nullptr;
        if (cell->plant_count > 0.0) {
          std::optional<double> target;
          if (c != Category::Standalone) {
            auto it = scenario.sc_targets.find(c);
            if (it == scenario.sc_targets.end()) continue;
            target = it->second;
          }
          try {
            pe = prosumer_for(c, z, target);
          } catch (const DataError& e) {
            report.errors.push_back("cell " + std::string(to_string(c)) + "/" +
                                    std::string(to_string(z)) + " in " +
                                    scenario.code + ": " + e.what());
            cell_failed = true;
            continue;
          }
          if (pe) {
            fs::path p = profiles_dir /
                         ("profile_" + scenario.code + "_" +
                          std::string(to_string(z)) + "_" +
                          std::string(to_string(c)) + ".csv");
            detail::Writer w(p);
            w.line("hour_index,pv_kwh,load_kwh,self_kwh,export_kwh");
            for (int t = 0; t < kHoursPerYear; ++t)
              w.line(std::to_string(t + 1) + "," + detail::fmt(pe->pv[t]) + "," +
                     detail::fmt(pe->load[t]) + "," +
                     detail::fmt(pe->self_consumed[t]) + "," +
                     detail::fmt(pe->exported[t]));
            ++files_written;
            report.counters["achieved_sc_permille_" + scenario.code + "_" +
                            std::string(to_string(z)) + "_" +
                            std::string(to_string(c))] =
                std::lround(pe->sc_ratio * 1000);
          }
        }
        per_category.push_back(project_series(*cell, pe));
      }
      if (cell_failed) continue;
      ZonalSeries zs = aggregate_zone(per_category, z);
      fs::path p = series_dir / ("series_" + scenario.code + "_" +
                                 std::string(to_string(z)) + ".csv");
      detail::Writer w(p);
      w.line("hour_index,export_mwh,self_mwh");
      for (int t = 0; t < kHoursPerYear; ++t)
        w.line(std::to_string(t + 1) + "," + detail::fmt(zs.export_mwh[t]) + "," +
               detail::fmt(zs.self_mwh[t]));
      ++files_written;
    }
  }
  report.counters["files_written"] = files_written;
  report.wall_seconds = timer.seconds();

  std::vector<std::string> inputs;
  for (auto& [z, _] : yields)
    inputs.push_back((fs::path(cfg.yield_dir) /
                      ("yield_" + std::string(to_string(z)) + ".csv")).string());
  for (auto& [c, _] : loads)
    inputs.push_back((fs::path(cfg.load_dir) /
                      ("load_" + std::string(to_string(c)) + ".csv")).string());
  write_manifest(cfg, report, inputs);
  return report;
}

// ---------------------------------------------------------------------------
// clear: bid ledger + zonal series -> equilibria + impact tables

inline StageReport cmd_clear(const RunConfig& cfg) {
  detail::Stopwatch timer;
  StageReport report;
  report.stage = "clear";

  if (cfg.ledger_path.empty() || !fs::exists(cfg.ledger_path))
    throw ConfigError("ledger path missing or not found: " + cfg.ledger_path);

  LedgerStats lstats;
  std::vector<BidRecord> bids =
      parse_bid_ledger(cfg.ledger_path, lstats, cfg.bids_mode, cfg.price_cap);
  report.counters["ledger_rows"] = lstats.rows_total;
  report.counters["ledger_parsed"] = lstats.parsed;
  report.counters["ledger_skipped_malformed"] = lstats.skipped_malformed;
  report.counters["ledger_skipped_zero_quantity"] = lstats.skipped_zero_quantity;
  report.counters["ledger_skipped_rejected"] = lstats.skipped_rejected;
  report.counters["ledger_skipped_off_calendar"] = lstats.skipped_off_calendar;

  // Immutable per zone-hour index built in a single pass.
  std::map<Zone, std::map<int, std::pair<std::vector<BidRecord>,
                                         std::vector<BidRecord>>>> index;
  for (const auto& b : bids) {
    auto t = hour_index(b.date.month, b.date.day, b.hour);
    if (!t) continue;
    auto& slot = index[b.zone][*t];
    (b.side == Side::supply ? slot.first : slot.second).push_back(b);
  }

  std::vector<Scenario> scenarios = resolve_scenarios(cfg);
  std::vector<Zone> zones = selected_zones(cfg);
  fs::path series_dir = fs::path(cfg.output_dir) / "series";
  fs::path eq_dir = fs::path(cfg.output_dir) / "equilibria";
  fs::path impact_dir = fs::path(cfg.output_dir) / "impact";
  fs::create_directories(eq_dir);
  fs::create_directories(impact_dir);

  long zones_excluded = 0;
  for (const auto& scenario : scenarios) {
    for (Zone z : zones) {
      fs::path sp = series_dir / ("series_" + scenario.code + "_" +
                                  std::string(to_string(z)) + ".csv");
      if (!fs::exists(sp)) {
        report.errors.push_back("missing zonal series: " + sp.string());
        continue;
      }
      HourlyProfile exp =
          load_profile_file(sp.string(), "export_mwh", ProfileKind::export_);
      HourlyProfile self =
          load_profile_file(sp.string(), "self_mwh", ProfileKind::self);

      auto zit = index.find(z);
      if (zit == index.end() || zit->second.empty()) {
        report.counters["zone_no_valid_hours_" + std::string(to_string(z))] = 1;
        ++zones_excluded;
        continue;
      }

      struct HourResult {
        int t = 0;
        Equilibrium actual, synthetic;
        ShiftAmounts shifts;
        bool valid = false;
      };
      std::vector<int> hours;
      for (const auto& [t, _] : zit->second) hours.push_back(t);
      std::vector<HourResult> results(hours.size());

      std::atomic<long> skipped{0};
      detail::parallel_for(hours.size(), cfg.threads, [&](size_t i) {
        int t = hours[i];
        const auto& [sup_bids, dem_bids] = zit->second.at(t);
        HourResult r;
        r.t = t;
        StepCurve sup = build_curve(sup_bids, Side::supply);
        StepCurve dem = build_curve(dem_bids, Side::demand);
        if (sup.empty() || dem.empty()) {
          skipped.fetch_add(1);
          results[i] = r;
          return;
        }
        r.shifts = {self[t - 1], exp[t - 1]};
        auto [actual, synthetic] = counterfactual_clear(
            sup, dem, r.shifts, cfg.price_cap, cfg.supply_removal);
        r.actual = actual;
        r.synthetic = synthetic;
        r.valid = true;
        results[i] = r;
      });
      report.counters["hours_skipped_" + scenario.code + "_" +
                      std::string(to_string(z))] = skipped.load();

      ImpactSeries impact;
      impact.zone = z;
      impact.scenario_code = scenario.code;
      impact.market_year = cfg.market_year;

      detail::Writer ew(eq_dir / ("equilibrium_" + scenario.code + "_" +
                                  std::string(to_string(z)) + ".csv"));
      ew.line("date,hour,price_actual,quantity_actual,price_synt,quantity_synt,"
              "delta_demand,delta_supply,crossing_kind");
      for (const auto& r : results) {
        if (!r.valid) continue;
        int m, d, h;
        from_hour_index(r.t, m, d, h);
        ew.line(format_date(cfg.market_year, m, d) + "," + std::to_string(h) + "," +
                detail::fmt_opt(r.actual.price) + "," +
                detail::fmt(r.actual.quantity) + "," +
                detail::fmt_opt(r.synthetic.price) + "," +
                detail::fmt(r.synthetic.quantity) + "," +
                detail::fmt(r.shifts.delta_demand) + "," +
                detail::fmt(r.shifts.delta_supply) + "," +
                std::string(to_string(r.synthetic.crossing_kind)));
        ImpactEntry e;
        e.hour_index = r.t;
        e.q_actual = r.actual.quantity;
        e.q_synt = r.synthetic.quantity;
        e.p_actual = r.actual.price;
        e.p_synt = r.synthetic.price;
        impact.entries.push_back(e);
      }
      if (impact.entries.empty()) {
        report.counters["zone_no_valid_hours_" + std::string(to_string(z))] = 1;
        ++zones_excluded;
        continue;
      }
      compute_impact(impact, cfg.smoothing, cfg.diff_baseline);

      detail::Writer iw(impact_dir / ("impact_" + scenario.code + "_" +
                                      std::string(to_string(z)) + ".csv"));
      iw.line("date,hour,q_actual,q_synt,p_actual,p_synt,rel_diff_pct,"
              "rel_diff_smoothed_pct");
      for (const auto& e : impact.entries) {
        int m, d, h;
        from_hour_index(e.hour_index, m, d, h);
        iw.line(format_date(cfg.market_year, m, d) + "," + std::to_string(h) + "," +
                detail::fmt_opt(e.q_actual) + "," + detail::fmt_opt(e.q_synt) + "," +
                detail::fmt_opt(e.p_actual) + "," + detail::fmt_opt(e.p_synt) + "," +
                detail::fmt_opt(e.rel_diff_pct) + "," +
                detail::fmt_opt(e.rel_diff_smoothed_pct));
      }

      // Monthly summary, both raw and smoothed.
      {
        detail::Writer mw(impact_dir / ("monthly_" + scenario.code + "_" +
                                        std::string(to_string(z)) + ".csv"));
        mw.line("month,mean_rel_diff_pct,mean_rel_diff_smoothed_pct,defined_hours");
        for (int month = 1; month <= 12; ++month) {
          double raw = 0.0, smoothed = 0.0;
          int n = 0;
          for (const auto& e : impact.entries) {
            int m, d, h;
            from_hour_index(e.hour_index, m, d, h);
            if (m != month || !e.rel_diff_pct) continue;
            raw += *e.rel_diff_pct;
            smoothed += e.rel_diff_smoothed_pct.value_or(0.0);
            ++n;
          }
          if (n == 0) continue;
          mw.line(std::to_string(month) + "," + detail::fmt(raw / n) + "," +
                  detail::fmt(smoothed / n) + "," + std::to_string(n));
        }
      }

      // 24-row hourly-profile tables by day type, plottable as-is.
      for (DayType dt : {DayType::all, DayType::weekday, DayType::weekend}) {
        const char* tag = dt == DayType::all       ? "all"
                          : dt == DayType::weekday ? "weekday"
                                                   : "weekend";
        std::vector<std::pair<int, double>> qa, qs;
        for (const auto& e : impact.entries) {
          if (e.q_actual) qa.emplace_back(e.hour_index, *e.q_actual);
          if (e.q_synt) qs.emplace_back(e.hour_index, *e.q_synt);
        }
        std::array<double, 24> pa{}, ps{};
        try {
          pa = hourly_profile_mean(qa, cfg.market_year, 0, dt);
          ps = hourly_profile_mean(qs, cfg.market_year, 0, dt);
        } catch (const DataError&) {
          continue;  // no days of this type in the selection
        }
        detail::Writer hw(impact_dir /
                          ("hourly_profile_" + scenario.code + "_" +
                           std::string(to_string(z)) + "_" + tag + ".csv"));
        hw.line("hour,q_actual_mean,q_synt_mean");
        for (int h = 0; h < 24; ++h)
          hw.line(std::to_string(h + 1) + "," + detail::fmt(pa[h]) + "," +
                  detail::fmt(ps[h]));
      }
    }
  }
  report.counters["zones_excluded"] = zones_excluded;
  report.wall_seconds = timer.seconds();
  write_manifest(cfg, report, {cfg.ledger_path});
  return report;
}

}  // namespace recmerit
