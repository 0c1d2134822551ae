// recmerit: batch pipeline for REC merit-order impact studies.
//
// Stages: derive (registry -> parameter tables), simulate (profiles ->
// zonal series), clear (bid ledger -> equilibria + impact tables).

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recmerit/fixture.hpp"
#include "recmerit/pipeline.hpp"

namespace {

struct Overrides {
  std::vector<std::string> scenarios;
  std::vector<std::string> zones;
  int year = 0;
  std::string bids;
  int window = 0;
  double price_cap = 0.0;
  int threads = 0;
  std::string output_dir;
};

void apply(const Overrides& o, recmerit::RunConfig& cfg) {
  if (!o.scenarios.empty()) cfg.scenarios = o.scenarios;
  if (!o.zones.empty()) {
    cfg.zones.clear();
    for (const auto& zs : o.zones) {
      auto z = recmerit::parse_zone(zs);
      if (!z) throw recmerit::ConfigError("unknown zone: " + zs);
      cfg.zones.push_back(*z);
    }
  }
  if (o.year) cfg.market_year = o.year;
  if (!o.bids.empty()) {
    if (o.bids == "all")
      cfg.bids_mode = recmerit::BidsMode::all;
    else if (o.bids == "accepted")
      cfg.bids_mode = recmerit::BidsMode::accepted;
    else
      throw recmerit::ConfigError("--bids must be all or accepted");
  }
  if (o.window) cfg.smoothing.window = o.window;
  if (o.price_cap > 0) cfg.price_cap = o.price_cap;
  if (o.threads) cfg.threads = o.threads;
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--scenario", o.scenarios, "Scenario code (repeatable)");
  cmd->add_option("--zone", o.zones, "Zone code (repeatable)");
  cmd->add_option("--year", o.year, "Market year");
  cmd->add_option("--bids", o.bids, "Bid selection: all | accepted");
  cmd->add_option("--window", o.window, "Smoothing window (odd hours)");
  cmd->add_option("--price-cap", o.price_cap, "Price cap, EUR/MWh");
  cmd->add_option("--threads", o.threads, "Worker threads for clearing");
  cmd->add_option("--output-dir", o.output_dir, "Override output directory");
}

int report_outcome(const recmerit::StageReport& r) {
  for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
  std::printf("[%s] done in %.2fs%s\n", r.stage.c_str(), r.wall_seconds,
              r.ok() ? "" : " (with errors; partial outputs written)");
  return r.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"REC deployment impact simulator for zonal day-ahead markets"};
  app.require_subcommand(1);

  std::string config_path;
  std::string fixture_dir;
  bool use_fixture = false;
  Overrides overrides;

  auto* derive = app.add_subcommand("derive", "Derive fleet parameters from the REC registry");
  auto* simulate = app.add_subcommand("simulate", "Build prosumer profiles and zonal series");
  auto* clear = app.add_subcommand("clear", "Clear the market and compute impact tables");
  auto* run_all = app.add_subcommand("run-all", "Run derive, simulate, and clear in sequence");
  auto* fixture = app.add_subcommand("fixture", "Generate the bundled synthetic mini-market");

  for (CLI::App* cmd : {derive, simulate, clear, run_all}) {
    cmd->add_option("--config", config_path, "Run configuration file (JSON)");
    add_overrides(cmd, overrides);
  }
  run_all->add_flag("--fixture", use_fixture,
                    "Generate the synthetic fixture first and run on it");
  run_all->add_option("--fixture-dir", fixture_dir, "Where to place the fixture");
  fixture->add_option("dir", fixture_dir, "Target directory")->required();
  fixture->add_option("--year", overrides.year, "Market year");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fixture->parsed()) {
      std::string cfg = recmerit::fixture::make_fixture(
          fixture_dir, overrides.year ? overrides.year : 2024);
      std::printf("fixture written; config at %s\n", cfg.c_str());
      return 0;
    }

    if (run_all->parsed() && use_fixture) {
      if (fixture_dir.empty()) fixture_dir = "recmerit_fixture";
      config_path = recmerit::fixture::make_fixture(fixture_dir);
    }
    if (config_path.empty())
      throw recmerit::ConfigError("--config is required (or run-all --fixture)");

    recmerit::RunConfig cfg = recmerit::load_config(config_path);
    apply(overrides, cfg);

    int rc = 0;
    if (derive->parsed() || run_all->parsed())
      rc = std::max(rc, report_outcome(recmerit::cmd_derive(cfg)));
    if (simulate->parsed() || run_all->parsed())
      rc = std::max(rc, report_outcome(recmerit::cmd_simulate(cfg)));
    if (clear->parsed() || run_all->parsed())
      rc = std::max(rc, report_outcome(recmerit::cmd_clear(cfg)));
    return rc;
  } catch (const recmerit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const recmerit::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
