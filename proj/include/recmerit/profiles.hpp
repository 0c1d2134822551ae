#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "recmerit/csv.hpp"
#include "recmerit/types.hpp"

namespace recmerit {

enum class ProfileKind { yield_per_kwp, pv, load, self, export_ };

// Annual hourly energy series, t = 1..8760 stored at index t-1.
struct HourlyProfile {
  std::vector<double> values;
  ProfileKind kind = ProfileKind::pv;

  double& operator[](size_t i) { return values[i]; }
  double operator[](size_t i) const { return values[i]; }
  size_t size() const { return values.size(); }

  double annual_sum() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
  }
};

struct ProsumerEnergy {
  Category category = Category::Public;
  Zone zone = Zone::NORD;
  HourlyProfile pv;
  HourlyProfile load;
  HourlyProfile self_consumed;
  HourlyProfile exported;
  double sc_ratio = 0.0;   // achieved annual self-consumption fraction
  double load_scale = 1.0; // tuned multiplier on the base load
};

struct TuneResult {
  double scale = 1.0;
  double achieved_ratio = 0.0;
  int iterations = 0;
};

inline void require_year_length(const HourlyProfile& p, const char* what) {
  if (p.size() != kHoursPerYear) {
    std::ostringstream msg;
    msg << what << ": expected " << kHoursPerYear << " hourly values, got "
        << p.size();
    if (p.size() == 8784) msg << " (leap-year input is rejected, not truncated)";
    throw DataError(msg.str());
  }
}

inline HourlyProfile scale_pv(const HourlyProfile& yield, double capacity_kwp) {
  require_year_length(yield, "scale_pv yield");
  if (capacity_kwp < 0) throw DataError("scale_pv: negative capacity");
  HourlyProfile out;
  out.kind = ProfileKind::pv;
  out.values.resize(yield.size());
  for (size_t t = 0; t < yield.size(); ++t)
    out.values[t] = yield[t] * capacity_kwp;
  return out;
}

inline double self_consumption_ratio(const HourlyProfile& pv,
                                     const HourlyProfile& load) {
  if (pv.size() != load.size())
    throw DataError("self_consumption_ratio: length mismatch");
  double self_sum = 0.0, pv_sum = 0.0;
  for (size_t t = 0; t < pv.size(); ++t) {
    self_sum += std::min(pv[t], load[t]);
    pv_sum += pv[t];
  }
  if (pv_sum <= 0.0)
    throw DataError("self_consumption_ratio: annual PV production is zero");
  return self_sum / pv_sum;
}

// Scales the base load by a constant until the annual self-consumption ratio
// hits the target. The ratio is nondecreasing in the scale, so a doubling
// bracket followed by bisection always converges when the target is reachable.
inline TuneResult tune_load_scale(const HourlyProfile& base_load,
                                  const HourlyProfile& pv, double target_sc,
                                  double tolerance = 1e-3,
                                  int max_iterations = 200) {
  if (pv.size() != base_load.size())
    throw DataError("tune_load_scale: length mismatch");
  if (target_sc <= 0.0 || target_sc > 1.0)
    throw DataError("tune_load_scale: target must be in (0, 1]");
  if (tolerance <= 0.0) throw DataError("tune_load_scale: tolerance must be > 0");

  // Supremum of the achievable ratio: as the scale grows, every hour with
  // positive load absorbs its full PV output.
  double pv_sum = 0.0, absorbable = 0.0;
  for (size_t t = 0; t < pv.size(); ++t) {
    pv_sum += pv[t];
    if (base_load[t] > 0.0) absorbable += pv[t];
  }
  if (pv_sum <= 0.0) throw DataError("tune_load_scale: annual PV is zero");
  const double supremum = absorbable / pv_sum;
  if (supremum < target_sc - tolerance) {
    std::ostringstream msg;
    msg << "tune_load_scale: target " << target_sc
        << " unreachable; achievable supremum is " << supremum;
    throw DataError(msg.str());
  }

  auto ratio_at = [&](double k) {
    double self_sum = 0.0;
    for (size_t t = 0; t < pv.size(); ++t)
      self_sum += std::min(pv[t], k * base_load[t]);
    return self_sum / pv_sum;
  };

  int iters = 0;
  double k = 1.0;
  double r = ratio_at(k);
  if (std::abs(r - target_sc) <= tolerance) return {k, r, iters};

  double lo, hi;
  if (r < target_sc) {
    lo = k;
    hi = 2.0 * k;
    while (ratio_at(hi) < target_sc) {
      lo = hi;
      hi *= 2.0;
      if (++iters > max_iterations)
        throw DataError("tune_load_scale: bracket expansion did not converge");
    }
  } else {
    hi = k;
    lo = k / 2.0;
    while (ratio_at(lo) > target_sc) {
      hi = lo;
      lo /= 2.0;
      if (++iters > max_iterations)
        throw DataError("tune_load_scale: bracket contraction did not converge");
    }
  }

  while (++iters <= max_iterations) {
    double mid = 0.5 * (lo + hi);
    double rm = ratio_at(mid);
    if (std::abs(rm - target_sc) <= tolerance) return {mid, rm, iters};
    if (rm < target_sc)
      lo = mid;
    else
      hi = mid;
  }
  throw DataError("tune_load_scale: no convergence within iteration cap");
}

inline std::pair<HourlyProfile, HourlyProfile> split_energy(
    const HourlyProfile& pv, const HourlyProfile& load) {
  if (pv.size() != load.size()) throw DataError("split_energy: length mismatch");
  HourlyProfile self, exp;
  self.kind = ProfileKind::self;
  exp.kind = ProfileKind::export_;
  self.values.resize(pv.size());
  exp.values.resize(pv.size());
  for (size_t t = 0; t < pv.size(); ++t) {
    self.values[t] = std::min(pv[t], load[t]);
    exp.values[t] = std::max(pv[t] - load[t], 0.0);
  }
  return {std::move(self), std::move(exp)};
}

// Composes scaling, tuning, and the hourly min/max split for one
// representative prosumer. Standalone producers take no load and no target;
// their full output is exported.
inline ProsumerEnergy build_prosumer(
    Category category, Zone zone, const HourlyProfile& yield,
    const std::optional<HourlyProfile>& base_load, double capacity_kwp,
    std::optional<double> target_sc, double tolerance = 1e-3,
    double derate_factor = 1.0) {
  ProsumerEnergy out;
  out.category = category;
  out.zone = zone;

  HourlyProfile net_yield = yield;
  if (derate_factor != 1.0)
    for (auto& v : net_yield.values) v *= derate_factor;
  out.pv = scale_pv(net_yield, capacity_kwp);

  if (category == Category::Standalone) {
    if (base_load || target_sc)
      throw DataError("build_prosumer: Standalone takes no load or sc target");
    out.load.kind = ProfileKind::load;
    out.load.values.assign(out.pv.size(), 0.0);
    out.self_consumed.kind = ProfileKind::self;
    out.self_consumed.values.assign(out.pv.size(), 0.0);
    out.exported = out.pv;
    out.exported.kind = ProfileKind::export_;
    out.sc_ratio = 0.0;
    return out;
  }

  if (!base_load || !target_sc)
    throw DataError("build_prosumer: load profile and sc target required");
  require_year_length(*base_load, "build_prosumer base_load");

  TuneResult tuned = tune_load_scale(*base_load, out.pv, *target_sc, tolerance);
  out.load_scale = tuned.scale;
  out.load.kind = ProfileKind::load;
  out.load.values.resize(base_load->size());
  for (size_t t = 0; t < base_load->size(); ++t)
    out.load.values[t] = tuned.scale * (*base_load)[t];

  auto [self, exp] = split_energy(out.pv, out.load);
  out.self_consumed = std::move(self);
  out.exported = std::move(exp);
  out.sc_ratio = tuned.achieved_ratio;
  return out;
}

// Reads `hour_index, <value column>` files; indices must cover 1..8760 exactly.
inline HourlyProfile load_profile_file(const std::string& path,
                                       const std::string& value_column,
                                       ProfileKind kind) {
  csv::Table t(path);
  t.require_columns({"hour_index", value_column}, path);
  HourlyProfile out;
  out.kind = kind;
  out.values.assign(kHoursPerYear, 0.0);
  std::vector<bool> seen(kHoursPerYear, false);
  if (t.row_count() == 8784)
    throw DataError(path + ": leap-year profile (8784 rows) rejected");
  for (size_t i = 0; i < t.row_count(); ++i) {
    auto idx = csv::parse_long(t.cell(i, "hour_index"));
    auto val = csv::parse_double(t.cell(i, value_column));
    if (!idx || !val)
      throw DataError(path + ": malformed row " + std::to_string(i + 2));
    if (*idx < 1 || *idx > kHoursPerYear)
      throw DataError(path + ": hour_index out of range: " + std::to_string(*idx));
    if (*val < 0)
      throw DataError(path + ": negative energy at hour " + std::to_string(*idx));
    out.values[*idx - 1] = *val;
    seen[*idx - 1] = true;
  }
  for (int t2 = 0; t2 < kHoursPerYear; ++t2)
    if (!seen[t2])
      throw DataError(path + ": missing hour_index " + std::to_string(t2 + 1));
  return out;
}

}  // namespace recmerit
