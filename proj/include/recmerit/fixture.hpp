#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "recmerit/calendar.hpp"
#include "recmerit/types.hpp"

namespace recmerit::fixture {

namespace fs = std::filesystem;

// Synthetic mini-market: two zones (NORD, CSUD), fourteen January days of
// bids, a small registry, and smooth yield/load shapes. Everything is
// generated from closed formulas and a fixed-seed LCG with integer outputs,
// so regeneration is bit-identical and quantity sums stay exact in doubles.

class Lcg {
 public:
  explicit Lcg(uint64_t seed) : state_(seed) {}
  uint64_t next() {
    state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
    return state_ >> 33;
  }
  // Uniform integer in [lo, hi].
  long range(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<uint64_t>(hi - lo + 1));
  }
 private:
  uint64_t state_;
};

inline constexpr int kFixtureDays = 14;

inline double yield_at(int t, bool sunny_zone) {
  int doy = (t - 1) / 24 + 1;
  int h = (t - 1) % 24 + 1;
  double daylight = std::sin(M_PI * (h - 6) / 14.0);
  if (h < 6 || h > 20 || daylight < 0) return 0.0;
  double seasonal = 0.6 + 0.4 * std::sin(2.0 * M_PI * (doy - 80) / 365.0);
  return 0.18 * daylight * seasonal * (sunny_zone ? 1.15 : 1.0);
}

inline double load_shape(Category c, int year, int t) {
  int doy = (t - 1) / 24 + 1;
  int h = (t - 1) % 24 + 1;
  int m, d, hh;
  from_hour_index(t, m, d, hh);
  bool weekend = is_weekend(year, m, d);
  double winter = 1.0 + 0.35 * std::cos(2.0 * M_PI * (doy - 15) / 365.0);
  switch (c) {
    case Category::Public:  // school: weekday working hours, winter heating
      if (weekend) return 0.3 * winter;
      return (h >= 8 && h <= 17 ? 3.0 : 0.4) * winter;
    case Category::SME:  // commercial: open every day, long hours
      return (h >= 9 && h <= 21 ? 2.2 : 0.5) * winter;
    case Category::NPO:  // office
      if (weekend) return 0.2;
      return (h >= 8 && h <= 18 ? 1.2 : 0.2) * winter;
    case Category::Residential:  // morning/evening peaks, summer cooling only
      {
        double base = 0.25;
        if (h >= 7 && h <= 9) base = 0.8;
        if (h >= 18 && h <= 22) base = 1.0;
        double summer = 1.0 + 0.5 * std::max(0.0, std::sin(2.0 * M_PI * (doy - 172) / 365.0));
        return base * summer;
      }
    case Category::Standalone:
      return 0.0;
  }
  return 0.0;
}

inline void write_profiles(const fs::path& dir, int market_year) {
  fs::create_directories(dir / "yields");
  fs::create_directories(dir / "loads");
  for (Zone z : {Zone::NORD, Zone::CSUD}) {
    std::ofstream out(dir / "yields" / ("yield_" + std::string(to_string(z)) + ".csv"));
    out << "hour_index,yield_kwh_per_kwp\n";
    for (int t = 1; t <= kHoursPerYear; ++t) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", yield_at(t, z == Zone::CSUD));
      out << t << "," << buf << "\n";
    }
  }
  for (Category c : kAllCategories) {
    if (c == Category::Standalone) continue;
    std::ofstream out(dir / "loads" / ("load_" + std::string(to_string(c)) + ".csv"));
    out << "hour_index,load_kwh\n";
    for (int t = 1; t <= kHoursPerYear; ++t) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", load_shape(c, market_year, t));
      out << t << "," << buf << "\n";
    }
  }
}

inline void write_registry(const fs::path& dir) {
  std::ofstream out(dir / "registry_fixture.csv");
  out << "id,zone,status,pv_capacity_kwp,share_public_pct,share_residential_pct,"
         "share_sme_pct,share_npo_pct,share_standalone_pct,n_rooftop_public,"
         "n_rooftop_residential,n_rooftop_sme,n_rooftop_npo,n_standalone,"
         "building_types_public,building_types_sme,building_types_npo,"
         "building_types_residential,self_consumption_pct,has_bess\n";
  // Hand-sized fleet: eight NORD RECs, four CSUD, every category covered.
  out << "fx01,NORD,operational,120,40,10,25,5,20,4,15,2,2,1,school,commercial building,office,detached house,49,0\n";
  out << "fx02,NORD,operational,200,35,15,20,10,20,5,20,2,3,2,school;town hall,commercial building,office,,50,0\n";
  out << "fx03,NORD,operational,90,50,10,20,10,10,3,12,2,2,1,school,hotel,church,,48,0\n";
  out << "fx04,NORD,design,150,30,20,25,5,20,4,18,3,2,2,town hall,commercial building,office,,51,0\n";
  out << "fx05,NORD,operational,110,45,15,15,10,15,5,16,2,2,1,school,commercial building,office,,49,\n";
  out << "fx06,NORD,design,80,40,10,30,10,10,4,14,2,2,1,school,commercial building,church,,,\n";
  out << "fx07,NORD,operational,140,35,15,25,5,20,4,20,3,2,2,school,commercial building,office,,50,0\n";
  out << "fx08,NORD,design,100,40,20,20,10,10,5,15,2,3,1,school,supermarket,office,,49,1\n";
  out << "fx09,CSUD,operational,130,45,10,20,5,20,4,14,2,2,2,school,commercial building,office,,48,0\n";
  out << "fx10,CSUD,operational,95,50,10,20,10,10,3,12,2,2,1,school,commercial building,church,,50,0\n";
  out << "fx11,CSUD,design,160,35,15,25,5,20,5,18,3,2,2,school;library,commercial building,office,,49,0\n";
  out << "fx12,CSUD,operational,105,40,15,20,10,15,4,16,2,2,1,school,hotel,office,,49,\n";
}

inline void write_ledger(const fs::path& dir, int market_year) {
  std::ofstream out(dir / "ledger_fixture.csv");
  out << "date,hour,zone,side,price_eur_mwh,quantity_mwh,status\n";
  Lcg rng(20240101);
  for (Zone z : {Zone::NORD, Zone::CSUD}) {
    for (int day = 1; day <= kFixtureDays; ++day) {
      std::string date = format_date(market_year, 1, day);
      for (int h = 1; h <= 24; ++h) {
        bool daylight = h >= 8 && h <= 17;
        // Supply merit order: a zero-price RES block then thermal steps.
        long res = (daylight ? 300 : 80) + rng.range(0, 60);
        out << date << "," << h << "," << to_string(z) << ",supply,0," << res
            << ",accepted\n";
        const long thermal_prices[5] = {30, 45, 60, 80, 120};
        for (long price : thermal_prices) {
          long q = 150 + rng.range(0, 100);
          out << date << "," << h << "," << to_string(z) << ",supply," << price
              << "," << q << ",accepted\n";
        }
        // Demand: price-taking block plus a sloped tail.
        long base = 500 + rng.range(0, 120) + (h >= 18 && h <= 21 ? 150 : 0);
        out << date << "," << h << "," << to_string(z) << ",demand,PT," << base
            << ",accepted\n";
        const long willingness[5] = {250, 180, 120, 90, 60};
        for (long price : willingness) {
          long q = 40 + rng.range(0, 40);
          out << date << "," << h << "," << to_string(z) << ",demand," << price
              << "," << q << ",accepted\n";
        }
      }
    }
  }
  // A handful of dirty rows the parser must skip and count.
  out << format_date(market_year, 1, 3) << ",7,NORD,supply,not-a-price,10,accepted\n";
  out << format_date(market_year, 1, 4) << ",9,CSUD,demand,50,0,accepted\n";
  out << format_date(market_year, 1, 5) << ",11,NORD,supply,25,30,rejected\n";
}

// Writes the whole fixture and a ready-to-run config; returns the config path.
inline std::string make_fixture(const fs::path& dir, int market_year = 2024) {
  fs::create_directories(dir);
  write_profiles(dir, market_year);
  write_registry(dir);
  write_ledger(dir, market_year);

  nlohmann::json cfg;
  cfg["paths"] = {{"registry", (dir / "registry_fixture.csv").string()},
                  {"yield_dir", (dir / "yields").string()},
                  {"load_dir", (dir / "loads").string()},
                  {"ledger", (dir / "ledger_fixture.csv").string()},
                  {"output_dir", (dir / "out").string()}};
  cfg["zones"] = {"NORD", "CSUD"};
  cfg["scenarios"] = {"sc45.2027", "sc50.HW.2027"};
  cfg["market_year"] = market_year;
  cfg["renormalize_shares"] = true;
  cfg["threads"] = 1;
  std::string path = (dir / "config_fixture.json").string();
  std::ofstream out(path);
  out << cfg.dump(2) << "\n";
  return path;
}

}  // namespace recmerit::fixture
