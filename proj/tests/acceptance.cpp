// Acceptance checklist runner. Each numbered criterion prints exactly one
// PASS/FAIL line; the exit code is the number of failures. Tolerances and
// runtime budgets are pinned here, not in configuration.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "recmerit/fixture.hpp"
#include "recmerit/pipeline.hpp"

using namespace recmerit;
namespace fs = std::filesystem;

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
        .count();
  }
 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

struct Checklist {
  int failures = 0;

  void report(int num, bool pass, const std::string& what, double secs) {
    std::printf("criterion %2d: %s  %s (%.2fs)\n", num, pass ? "PASS" : "FAIL",
                what.c_str(), secs);
    if (!pass) ++failures;
  }
  void documented(int num, const std::string& what) {
    std::printf("criterion %2d: DOCUMENTED (not CI-gated)  %s\n", num,
                what.c_str());
  }
};

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// --- criterion 1: energy balance, zero tolerance --------------------------

bool energy_balance() {
  oracles::Lcg rng(1001);
  // Randomized hour pairs, integer-valued so every sum is exact.
  for (int i = 0; i < 10000; ++i) {
    HourlyProfile pv, load;
    pv.values = {static_cast<double>(rng.range(0, 1000000))};
    load.values = {static_cast<double>(rng.range(0, 1000000))};
    auto [self, exp] = split_energy(pv, load);
    if (self[0] + exp[0] != pv[0]) return false;
    if (self[0] > pv[0] || self[0] > load[0]) return false;
  }
  // Full-year fuzzed profiles.
  for (int rep = 0; rep < 5; ++rep) {
    HourlyProfile pv, load;
    pv.values.resize(kHoursPerYear);
    load.values.resize(kHoursPerYear);
    for (int t = 0; t < kHoursPerYear; ++t) {
      pv.values[t] = static_cast<double>(rng.range(0, 5000));
      load.values[t] = static_cast<double>(rng.range(0, 5000));
    }
    auto [self, exp] = split_energy(pv, load);
    for (int t = 0; t < kHoursPerYear; ++t) {
      if (self[t] + exp[t] != pv[t]) return false;
      if (self[t] > std::min(pv[t], load[t])) return false;
    }
  }
  return true;
}

// --- criterion 2: tuning convergence ---------------------------------------

bool tuning_convergence() {
  oracles::Lcg rng(2002);
  for (double target : {0.45, 0.50, 0.55}) {
    for (int rep = 0; rep < 50; ++rep) {
      HourlyProfile pv, load;
      for (int t = 0; t < 720; ++t) {
        int h = t % 24;
        double daylight =
            h >= 6 && h <= 18 ? std::sin(M_PI * (h - 6) / 12.0) : 0.0;
        pv.values.push_back(daylight * static_cast<double>(rng.range(5, 50)));
        load.values.push_back(static_cast<double>(rng.range(1, 40)));
      }
      TuneResult r = tune_load_scale(load, pv, target, 1e-3);
      HourlyProfile scaled = load;
      for (auto& v : scaled.values) v *= r.scale;
      if (std::abs(self_consumption_ratio(pv, scaled) - target) > 1e-3)
        return false;
    }
  }
  return true;
}

// --- criterion 3: clearing equals the brute-force scan ----------------------

bool clearing_oracle() {
  oracles::Lcg rng(3003);
  for (int i = 0; i < 1000; ++i) {
    oracles::Instance inst = oracles::random_instance(rng, 200);
    Equilibrium expected = oracles::brute_force_clear(inst.supply, inst.demand);
    StepCurve sup = build_curve(oracles::to_bids(inst.supply, Side::supply),
                                Side::supply);
    StepCurve dem = build_curve(oracles::to_bids(inst.demand, Side::demand),
                                Side::demand);
    Equilibrium got = clear(sup, dem);
    if (got.quantity != expected.quantity) return false;
    if (got.price.has_value() != expected.price.has_value()) return false;
    if (got.price && *got.price != *expected.price) return false;
  }
  return true;
}

// --- criterion 4: counterfactual laws ---------------------------------------

bool counterfactual_laws() {
  oracles::Lcg rng(4004);
  for (int i = 0; i < 1000; ++i) {
    oracles::Instance inst = oracles::random_instance(rng, 50);
    StepCurve sup = build_curve(oracles::to_bids(inst.supply, Side::supply),
                                Side::supply);
    StepCurve dem = build_curve(oracles::to_bids(inst.demand, Side::demand),
                                Side::demand);
    double total_supply = sup.total_quantity();

    // (a) price dominance with nonnegative shifts that leave supply alive.
    ShiftAmounts shifts{static_cast<double>(rng.range(0, 100)),
                        static_cast<double>(rng.range(0, static_cast<long>(total_supply / 2)))};
    auto [actual, synthetic] = counterfactual_clear(sup, dem, shifts);
    if (!actual.price || !synthetic.price) return false;
    if (*synthetic.price < *actual.price) return false;

    // (c) zero shifts reproduce the actual equilibrium bit-exactly.
    auto [a0, s0] = counterfactual_clear(sup, dem, ShiftAmounts{0.0, 0.0});
    if (s0.quantity != a0.quantity) return false;
    if (s0.price.has_value() != a0.price.has_value()) return false;
    if (s0.price && *s0.price != *a0.price) return false;
    if (s0.crossing_kind != a0.crossing_kind) return false;

    // (b) pure demand shift against inelastic demand moves Q by exactly delta.
    long s_total = static_cast<long>(total_supply);
    if (s_total >= 3) {
      long d = rng.range(1, s_total / 2);
      long delta = rng.range(0, s_total - d);
      std::vector<oracles::SimpleBid> inelastic = {
          {kDefaultPriceCap, static_cast<double>(d)}};
      StepCurve dem_i = build_curve(
          oracles::to_bids(inelastic, Side::demand), Side::demand);
      auto [ai, si] = counterfactual_clear(
          sup, dem_i, ShiftAmounts{static_cast<double>(delta), 0.0});
      if (si.quantity - ai.quantity != static_cast<double>(delta)) return false;
    }
  }
  return true;
}

// --- criterion 5: projection linearity + the hand-arithmetic cell ------------

bool projection_linearity() {
  std::map<std::pair<Category, Zone>, Stat> shares, units;
  ZonalShares zonal;
  for (Zone z : kAllZones) zonal.shares_pct[z] = 0.0;
  zonal.shares_pct[Zone::NORD] = 63.8;
  zonal.shares_pct[Zone::CSUD] = 36.2;
  zonal.total_recs = 10;
  for (Zone z : {Zone::NORD, Zone::CSUD})
    for (Category c : kAllCategories) {
      shares[{c, z}] = Stat{20.0, 2};
      units[{c, z}] = Stat{40.0, 2};
    }

  Scenario s;
  s.code = "lin";
  s.total_capacity_gw = 5.0;
  for (Category c : kAllCategories)
    if (c != Category::Standalone) s.sc_targets[c] = 0.5;

  // Eq-style hand cell: 5,000 MW x 63.8% x 20% -> 638 MW.
  FleetAllocation base = allocate(s, zonal, shares, units);
  const AllocationCell* cell = base.find(Category::Public, Zone::NORD);
  if (!cell || cell->allocated_capacity_kwp != 638000.0) return false;

  // Doubling the scenario total doubles every series value.
  oracles::Lcg rng(5005);
  ProsumerEnergy pe;
  pe.exported.values.resize(kHoursPerYear);
  pe.self_consumed.values.resize(kHoursPerYear);
  for (int t = 0; t < kHoursPerYear; ++t) {
    pe.exported.values[t] = static_cast<double>(rng.range(0, 100));
    pe.self_consumed.values[t] = static_cast<double>(rng.range(0, 100));
  }
  Scenario s2 = s;
  s2.total_capacity_gw = 10.0;
  FleetAllocation doubled = allocate(s2, zonal, shares, units);
  for (Zone z : {Zone::NORD, Zone::CSUD}) {
    std::vector<CategoryZonalSeries> p1, p2;
    for (Category c : kAllCategories) {
      p1.push_back(project_series(*base.find(c, z), &pe));
      p2.push_back(project_series(*doubled.find(c, z), &pe));
    }
    ZonalSeries z1 = aggregate_zone(p1, z);
    ZonalSeries z2 = aggregate_zone(p2, z);
    for (int t = 0; t < kHoursPerYear; ++t) {
      if (z1.export_mwh[t] == 0.0) {
        if (z2.export_mwh[t] != 0.0) return false;
        continue;
      }
      if (std::abs(z2.export_mwh[t] / z1.export_mwh[t] - 2.0) > 1e-12)
        return false;
      if (z1.self_mwh[t] > 0.0 &&
          std::abs(z2.self_mwh[t] / z1.self_mwh[t] - 2.0) > 1e-12)
        return false;
    }
  }
  return true;
}

// --- criterion 6: scenario table fidelity ------------------------------------

bool scenario_table() {
  auto all = builtin_scenarios();
  if (all.size() != 11) return false;
  struct Row {
    const char* code;
    double gw;
    double sc;
    bool policy;
  };
  const Row uniform[] = {
      {"sc45.2027", 5.0, 0.45, true},    {"sc50.2027", 5.0, 0.50, true},
      {"sc55.2027", 5.0, 0.55, true},    {"sc45.HW.2027", 1.47, 0.45, false},
      {"sc50.HW.2027", 1.47, 0.50, false}, {"sc55.HW.2027", 1.47, 0.55, false},
      {"sc45.BU.2027", 0.119, 0.45, false}, {"sc50.BU.2027", 0.119, 0.50, false},
      {"sc55.BU.2027", 0.119, 0.55, false}};
  for (const Row& r : uniform) {
    auto s = find_scenario(all, r.code);
    if (!s || s->total_capacity_gw != r.gw || !s->includes_standalone ||
        s->policy_target_achieving != r.policy)
      return false;
    for (Category c : kAllCategories) {
      if (c == Category::Standalone) {
        if (s->sc_targets.count(c)) return false;
      } else if (s->sc_targets.at(c) != r.sc) {
        return false;
      }
    }
  }
  auto mix1 = find_scenario(all, "sc_mix1.2027");
  auto mix2 = find_scenario(all, "sc_mix2.2027");
  if (!mix1 || !mix2) return false;
  if (mix1->includes_standalone || mix2->includes_standalone) return false;
  if (mix1->sc_targets.at(Category::Public) != 0.50 ||
      mix1->sc_targets.at(Category::Residential) != 0.45 ||
      mix1->sc_targets.at(Category::SME) != 0.55 ||
      mix1->sc_targets.at(Category::NPO) != 0.50)
    return false;
  for (auto& [c, t] : mix2->sc_targets)
    if (t != 0.55) return false;
  return true;
}

// --- criterion 7: packaged registry fixture ----------------------------------

bool registry_fixture(const std::string& data_dir) {
  auto records = load_rec_registry(data_dir + "/registry_362.csv");
  if (records.size() != 362) return false;
  ZonalShares z = zonal_shares(records);
  if (std::abs(z.shares_pct.at(Zone::NORD) - 63.8) > 0.05) return false;
  if (std::abs(z.shares_pct.at(Zone::CSUD) - 19.1) > 0.05) return false;
  Stat sc = mean_self_consumption_pct(records);
  return sc.present() && std::abs(sc.value - 49.1) <= 0.1;
}

// --- criterion 8: smoothing fidelity -----------------------------------------

bool smoothing_fidelity() {
  std::vector<double> v(24);
  for (int i = 0; i < 24; ++i) v[i] = (i % 5) * 1.5 - 1.0;  // mixes signs
  SmoothingConfig cfg;  // window 7, positive-only
  std::vector<double> got = smooth(v, cfg);
  for (int i = 0; i < 24; ++i) {
    double expected;
    if (i < 3 || i >= 21 || v[i] <= 0.0) {
      expected = v[i];  // edge or non-positive entry: bit-unchanged
    } else {
      double sum = 0.0;
      for (int j = i - 3; j <= i + 3; ++j) sum += v[j];
      expected = sum / 7.0;
    }
    if (got[i] != expected) return false;
  }
  return true;
}

// --- criterion 9: end-to-end fixture against the clearing oracle -------------

struct HourBids {
  std::vector<oracles::SimpleBid> supply, demand;
};

std::map<int, HourBids> index_ledger(const std::string& ledger, Zone zone) {
  LedgerStats stats;
  std::map<int, HourBids> out;
  for (const BidRecord& b : parse_bid_ledger(ledger, stats)) {
    if (b.zone != zone) continue;
    auto t = hour_index(b.date.month, b.date.day, b.hour);
    if (!t) continue;
    auto& slot = out[*t];
    (b.side == Side::supply ? slot.supply : slot.demand)
        .push_back({b.price, b.quantity});
  }
  return out;
}

// Independent counterfactual: append a cap-price demand bid and trim the
// cheapest supply bids, then clear by brute force.
std::pair<Equilibrium, Equilibrium> oracle_counterfactual(
    const HourBids& bids, double delta_demand, double delta_supply) {
  Equilibrium actual = oracles::brute_force_clear(bids.supply, bids.demand);
  std::vector<oracles::SimpleBid> dem = bids.demand;
  if (delta_demand > 0.0) dem.push_back({kDefaultPriceCap, delta_demand});
  std::vector<oracles::SimpleBid> sup = bids.supply;
  std::sort(sup.begin(), sup.end(),
            [](const auto& a, const auto& b) { return a.price < b.price; });
  double left = delta_supply;
  std::vector<oracles::SimpleBid> trimmed;
  for (const auto& b : sup) {
    if (left >= b.quantity) {
      left -= b.quantity;
      continue;
    }
    trimmed.push_back({b.price, b.quantity - left});
    left = 0.0;
  }
  Equilibrium synthetic = oracles::brute_force_clear(trimmed, dem);
  return {actual, synthetic};
}

bool end_to_end_fixture() {
  fs::path dir = fs::temp_directory_path() / "recmerit_acceptance" / "e2e";
  fs::remove_all(dir);
  RunConfig cfg = load_config(fixture::make_fixture(dir));
  if (!cmd_derive(cfg).ok()) return false;
  if (!cmd_simulate(cfg).ok()) return false;
  if (!cmd_clear(cfg).ok()) return false;

  fs::path impact_dir = fs::path(cfg.output_dir) / "impact";
  const std::vector<std::string> codes = {"sc45.2027", "sc50.HW.2027"};
  const std::vector<Zone> zones = {Zone::NORD, Zone::CSUD};

  // Regenerate every impact value through the brute-force oracle.
  for (const std::string& code : codes) {
    for (Zone z : zones) {
      auto bids = index_ledger(cfg.ledger_path, z);
      fs::path sp = fs::path(cfg.output_dir) / "series" /
                    ("series_" + code + "_" + std::string(to_string(z)) + ".csv");
      HourlyProfile exp =
          load_profile_file(sp.string(), "export_mwh", ProfileKind::export_);
      HourlyProfile self =
          load_profile_file(sp.string(), "self_mwh", ProfileKind::self);

      fs::path ip = impact_dir / ("impact_" + code + "_" +
                                  std::string(to_string(z)) + ".csv");
      csv::Table t(ip.string());
      if (t.row_count() != 14 * 24) return false;
      std::vector<double> oracle_diff(t.row_count(), 0.0);
      for (size_t i = 0; i < t.row_count(); ++i) {
        auto date = parse_date(t.cell(i, "date"));
        auto hour = csv::parse_long(t.cell(i, "hour"));
        if (!date || !hour) return false;
        auto ht = hour_index(date->month, date->day, static_cast<int>(*hour));
        if (!ht) return false;
        auto [actual, synthetic] = oracle_counterfactual(
            bids.at(*ht), self[*ht - 1], exp[*ht - 1]);
        auto qa = csv::parse_double(t.cell(i, "q_actual"));
        auto qs = csv::parse_double(t.cell(i, "q_synt"));
        auto pa = csv::parse_double(t.cell(i, "p_actual"));
        auto ps = csv::parse_double(t.cell(i, "p_synt"));
        if (!qa || !qs || !pa || !ps) return false;
        if (!close_rel(*qa, actual.quantity, 1e-9)) return false;
        if (!close_rel(*qs, synthetic.quantity, 1e-9)) return false;
        if (!actual.price || !close_rel(*pa, *actual.price, 1e-9)) return false;
        if (!synthetic.price || !close_rel(*ps, *synthetic.price, 1e-9))
          return false;
        if (synthetic.quantity <= 0.0) return false;
        double diff =
            100.0 * (actual.quantity - synthetic.quantity) / synthetic.quantity;
        oracle_diff[i] = diff;
        auto rd = csv::parse_double(t.cell(i, "rel_diff_pct"));
        if (!rd || !close_rel(*rd, diff, 1e-6)) return false;
      }
      std::vector<double> smoothed = smooth(oracle_diff, SmoothingConfig{});
      for (size_t i = 0; i < t.row_count(); ++i) {
        auto rs = csv::parse_double(t.cell(i, "rel_diff_smoothed_pct"));
        if (!rs || !close_rel(*rs, smoothed[i], 1e-6)) return false;
      }
    }
  }

  // Reruns must be byte-identical.
  std::map<std::string, std::string> digests;
  for (const auto& e : fs::recursive_directory_iterator(impact_dir))
    if (e.is_regular_file())
      digests[e.path().string()] = digest_file(e.path().string());
  if (!cmd_clear(cfg).ok()) return false;
  for (const auto& [path, digest] : digests)
    if (digest_file(path) != digest) return false;
  return true;
}

// --- criterion 10: directional sanity ----------------------------------------

bool directional_sanity() {
  fs::path dir = fs::temp_directory_path() / "recmerit_acceptance" / "direction";
  fs::remove_all(dir);
  RunConfig cfg = load_config(fixture::make_fixture(dir));
  cfg.output_dir = (dir / "out10").string();
  cfg.zones = {Zone::NORD};

  // Two hand-written zonal series: one where hourly self-consumption
  // dominates injection in every daylight hour, and its mirror image.
  fs::path series = fs::path(cfg.output_dir) / "series";
  fs::create_directories(series);
  auto write_series = [&](const std::string& code, double self_day,
                          double export_day) {
    std::ofstream out(series / ("series_" + code + "_NORD.csv"));
    out << "hour_index,export_mwh,self_mwh\n";
    for (int t = 1; t <= kHoursPerYear; ++t) {
      int h = (t - 1) % 24 + 1;
      bool daylight = h >= 8 && h <= 17;
      out << t << "," << (daylight ? export_day : 0.0) << ","
          << (daylight ? self_day : 0.0) << "\n";
    }
  };
  write_series("sink.test", 40.0, 4.0);
  write_series("source.test", 4.0, 40.0);

  nlohmann::json scen = nlohmann::json::array();
  for (const char* code : {"sink.test", "source.test"})
    scen.push_back({{"code", code},
                    {"total_capacity_gw", 1.0},
                    {"sc_targets", {{"Public", 0.5}}}});
  fs::path sp = dir / "scenarios_direction.json";
  { std::ofstream out(sp); out << scen.dump(2) << "\n"; }
  cfg.scenario_file = sp.string();
  cfg.scenarios = {"sink.test", "source.test"};

  if (!cmd_clear(cfg).ok()) return false;

  auto mean_diff = [&](const std::string& code) {
    csv::Table t((fs::path(cfg.output_dir) / "impact" /
                  ("impact_" + code + "_NORD.csv")).string());
    double sum = 0.0;
    int n = 0;
    for (size_t i = 0; i < t.row_count(); ++i)
      if (auto v = csv::parse_double(t.cell(i, "rel_diff_pct"))) {
        sum += *v;
        ++n;
      }
    return n ? sum / n : 0.0;
  };
  return mean_diff("sink.test") < 0.0 && mean_diff("source.test") > 0.0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string data_dir = argc > 1 ? argv[1] : "data";
  Checklist list;
  auto run = [&](int num, const std::string& what, double budget_s, auto fn) {
    Timer timer;
    bool pass = false;
    try {
      pass = fn();
    } catch (const std::exception& e) {
      std::printf("criterion %2d: exception: %s\n", num, e.what());
      pass = false;
    }
    double secs = timer.seconds();
    if (budget_s > 0 && secs >= budget_s) pass = false;
    list.report(num, pass, what, secs);
  };

  run(1, "energy balance, exact, 10000 pairs + full-year fuzz", 5.0,
      energy_balance);
  run(2, "tuning hits 0.45/0.50/0.55 within 1e-3, 50 fixtures each", 30.0,
      tuning_convergence);
  run(3, "clearing equals brute-force scan on 1000 instances", 10.0,
      clearing_oracle);
  run(4, "counterfactual price dominance, exact demand shift, zero-shift identity",
      0.0, counterfactual_laws);
  run(5, "projection linearity 1e-12 and the 638 MW hand cell", 0.0,
      projection_linearity);
  run(6, "all 11 builtin scenarios exact", 0.0, scenario_table);
  run(7, "362-row registry: NORD 63.8 +/- 0.05, CSUD 19.1 +/- 0.05, sc 49.1 +/- 0.1",
      0.0, [&] { return registry_fixture(data_dir); });
  run(8, "7-window smoothing matches hand means, non-positive bit-unchanged",
      0.0, smoothing_fidelity);
  run(9, "end-to-end fixture regenerated via oracle, reruns byte-identical",
      60.0, end_to_end_fixture);
  run(10, "demand-dominant shifts -> negative mean diff; supply-dominant -> positive",
      0.0, directional_sanity);
  list.documented(11,
      "real-ledger reproduction bands; needs external market data, see README");

  return list.failures;
}
