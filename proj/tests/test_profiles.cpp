#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "recmerit/profiles.hpp"

using namespace recmerit;

namespace {

HourlyProfile padded(std::vector<double> head, ProfileKind kind) {
  HourlyProfile p;
  p.kind = kind;
  p.values = std::move(head);
  p.values.resize(kHoursPerYear, 0.0);
  return p;
}

HourlyProfile short_profile(std::vector<double> v, ProfileKind kind) {
  HourlyProfile p;
  p.kind = kind;
  p.values = std::move(v);
  return p;
}

}  // namespace

TEST_CASE("scale_pv multiplies the yield by the capacity") {
  HourlyProfile yield = padded({0.1, 0.5, 0.0}, ProfileKind::yield_per_kwp);
  HourlyProfile pv = scale_pv(yield, 10.0);
  CHECK(pv[0] == 1.0);
  CHECK(pv[1] == 5.0);
  CHECK(pv[2] == 0.0);

  SECTION("zero capacity gives an all-zero profile") {
    HourlyProfile z = scale_pv(yield, 0.0);
    CHECK(z.annual_sum() == 0.0);
  }
  SECTION("constant yield scales to a constant") {
    HourlyProfile ones = padded({}, ProfileKind::yield_per_kwp);
    ones.values.assign(kHoursPerYear, 1.0);
    HourlyProfile p = scale_pv(ones, 35.0);
    CHECK(p[0] == 35.0);
    CHECK(p[8759] == 35.0);
  }
  SECTION("wrong length is rejected, leap length named explicitly") {
    HourlyProfile bad = short_profile({1, 2, 3}, ProfileKind::yield_per_kwp);
    CHECK_THROWS_AS(scale_pv(bad, 1.0), DataError);
    HourlyProfile leap;
    leap.values.assign(8784, 1.0);
    CHECK_THROWS_WITH(scale_pv(leap, 1.0),
                      Catch::Matchers::ContainsSubstring("leap"));
  }
  SECTION("linearity: scale(a+b) = scale(a) + scale(b)") {
    HourlyProfile a = scale_pv(yield, 3.0);
    HourlyProfile b = scale_pv(yield, 4.0);
    HourlyProfile ab = scale_pv(yield, 7.0);
    for (int t = 0; t < 5; ++t)
      CHECK(ab[t] == Catch::Approx(a[t] + b[t]).margin(1e-12));
  }
}

TEST_CASE("self_consumption_ratio") {
  HourlyProfile pv = short_profile({2, 0}, ProfileKind::pv);
  HourlyProfile load = short_profile({1, 5}, ProfileKind::load);
  CHECK(self_consumption_ratio(pv, load) == 0.5);

  SECTION("load covering pv everywhere gives 1") {
    HourlyProfile big = short_profile({10, 10}, ProfileKind::load);
    CHECK(self_consumption_ratio(pv, big) == 1.0);
  }
  SECTION("zero load gives 0") {
    HourlyProfile none = short_profile({0, 0}, ProfileKind::load);
    CHECK(self_consumption_ratio(pv, none) == 0.0);
  }
  SECTION("zero annual pv is an error") {
    HourlyProfile zpv = short_profile({0, 0}, ProfileKind::pv);
    CHECK_THROWS_AS(self_consumption_ratio(zpv, load), DataError);
  }
}

TEST_CASE("split_energy equals the scalar reference loop") {
  oracles::Lcg rng(99);
  HourlyProfile pv, load;
  pv.kind = ProfileKind::pv;
  load.kind = ProfileKind::load;
  for (int t = 0; t < 48; ++t) {
    pv.values.push_back(static_cast<double>(rng.range(0, 20)));
    load.values.push_back(static_cast<double>(rng.range(0, 20)));
  }
  auto [self, exp] = split_energy(pv, load);
  for (int t = 0; t < 48; ++t) {
    double ref_self = pv[t] < load[t] ? pv[t] : load[t];
    double ref_exp = pv[t] - load[t] > 0 ? pv[t] - load[t] : 0.0;
    CHECK(self[t] == ref_self);
    CHECK(exp[t] == ref_exp);
    CHECK(self[t] + exp[t] == pv[t]);  // exact balance
  }

  SECTION("zero pv splits to zeros") {
    HourlyProfile zero = short_profile(std::vector<double>(48, 0.0), ProfileKind::pv);
    auto [s2, e2] = split_energy(zero, load);
    CHECK(s2.annual_sum() == 0.0);
    CHECK(e2.annual_sum() == 0.0);
  }
  SECTION("length mismatch rejected") {
    HourlyProfile shorty = short_profile({1.0}, ProfileKind::pv);
    CHECK_THROWS_AS(split_energy(shorty, load), DataError);
  }
}

TEST_CASE("tune_load_scale finds the fixed point at k = 1") {
  HourlyProfile pv = short_profile({2, 0}, ProfileKind::pv);
  HourlyProfile load = short_profile({1, 5}, ProfileKind::load);
  TuneResult r = tune_load_scale(load, pv, 0.5, 1e-3);
  CHECK(r.scale == 1.0);
  CHECK(r.achieved_ratio == 0.5);
}

TEST_CASE("tune_load_scale step function bracket") {
  HourlyProfile pv = short_profile({1, 1}, ProfileKind::pv);
  HourlyProfile load = short_profile({1, 0}, ProfileKind::load);
  // Ratio is min(1, k)/2: target 0.5 is met exactly at k = 1.
  TuneResult r = tune_load_scale(load, pv, 0.5, 1e-3);
  CHECK(r.achieved_ratio == Catch::Approx(0.5).margin(1e-3));
  CHECK(r.scale == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("tune_load_scale hits each deployment target on toy profiles") {
  // Smooth daylight pv against a flat-ish load: ratio varies continuously.
  HourlyProfile pv, load;
  for (int t = 0; t < 240; ++t) {
    int h = t % 24;
    pv.values.push_back(h >= 6 && h <= 18 ? std::sin(M_PI * (h - 6) / 12.0) : 0.0);
    load.values.push_back(0.3 + 0.1 * (h >= 18));
  }
  for (double target : {0.45, 0.50, 0.55}) {
    TuneResult r = tune_load_scale(load, pv, target, 1e-3);
    // Re-evaluation oracle: scale and recompute from scratch.
    HourlyProfile scaled = load;
    for (auto& v : scaled.values) v *= r.scale;
    CHECK(self_consumption_ratio(pv, scaled) ==
          Catch::Approx(target).margin(1e-3));
  }
}

TEST_CASE("tune_load_scale names the achievable supremum when unreachable") {
  // All pv falls in zero-load hours: supremum 0.
  HourlyProfile pv = short_profile({1, 0}, ProfileKind::pv);
  HourlyProfile load = short_profile({0, 1}, ProfileKind::load);
  CHECK_THROWS_WITH(tune_load_scale(load, pv, 0.5, 1e-3),
                    Catch::Matchers::ContainsSubstring("supremum"));
}

TEST_CASE("tune_load_scale validates arguments") {
  HourlyProfile pv = short_profile({1, 1}, ProfileKind::pv);
  HourlyProfile load = short_profile({1, 1}, ProfileKind::load);
  CHECK_THROWS_AS(tune_load_scale(load, pv, 0.0, 1e-3), DataError);
  CHECK_THROWS_AS(tune_load_scale(load, pv, 1.5, 1e-3), DataError);
  CHECK_THROWS_AS(tune_load_scale(load, pv, 0.5, 0.0), DataError);
}

TEST_CASE("monotonicity of the ratio in the load scale") {
  oracles::Lcg rng(123);
  HourlyProfile pv, load;
  for (int t = 0; t < 100; ++t) {
    pv.values.push_back(static_cast<double>(rng.range(0, 10)));
    load.values.push_back(static_cast<double>(rng.range(0, 10)));
  }
  double prev = 0.0;
  for (double k = 0.1; k < 4.0; k += 0.1) {
    HourlyProfile scaled = load;
    for (auto& v : scaled.values) v *= k;
    double r = self_consumption_ratio(pv, scaled);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("build_prosumer for standalone producers") {
  HourlyProfile yield;
  yield.values.assign(kHoursPerYear, 0.0);
  for (int t = 0; t < kHoursPerYear; ++t)
    if (t % 24 >= 8 && t % 24 <= 16) yield.values[t] = 0.1;
  ProsumerEnergy pe = build_prosumer(Category::Standalone, Zone::SUD, yield,
                                     std::nullopt, 100.0, std::nullopt);
  for (int t = 0; t < kHoursPerYear; ++t) {
    CHECK(pe.exported[t] == pe.pv[t]);
    CHECK(pe.self_consumed[t] == 0.0);
  }
  CHECK(pe.sc_ratio == 0.0);

  HourlyProfile load;
  load.values.assign(kHoursPerYear, 1.0);
  CHECK_THROWS_AS(build_prosumer(Category::Standalone, Zone::SUD, yield, load,
                                 100.0, std::nullopt),
                  DataError);
}

TEST_CASE("build_prosumer composes tuning and the energy balance") {
  HourlyProfile yield, base_load;
  yield.values.assign(kHoursPerYear, 0.0);
  base_load.values.assign(kHoursPerYear, 0.0);
  for (int t = 0; t < kHoursPerYear; ++t) {
    int h = t % 24;
    if (h >= 6 && h <= 18) yield.values[t] = std::sin(M_PI * (h - 6) / 12.0) * 0.15;
    base_load.values[t] = 0.4 + 0.2 * (h >= 8 && h <= 17);
  }
  ProsumerEnergy pe = build_prosumer(Category::Public, Zone::NORD, yield,
                                     base_load, 35.0, 0.50);
  CHECK(pe.sc_ratio == Catch::Approx(0.50).margin(1e-3));
  for (int t = 0; t < kHoursPerYear; ++t) {
    CHECK(pe.self_consumed[t] + pe.exported[t] == pe.pv[t]);
    CHECK(pe.self_consumed[t] <= pe.load[t]);
    CHECK(pe.self_consumed[t] <= pe.pv[t]);
  }
  // Annual export share is the exact complement of the sc ratio.
  double pv_sum = pe.pv.annual_sum();
  CHECK(pe.exported.annual_sum() / pv_sum ==
        Catch::Approx(1.0 - pe.sc_ratio).margin(1e-12));
}
