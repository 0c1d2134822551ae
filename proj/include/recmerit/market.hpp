#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "recmerit/calendar.hpp"
#include "recmerit/csv.hpp"
#include "recmerit/types.hpp"

namespace recmerit {

inline constexpr double kDefaultPriceCap = 4000.0;  // EUR/MWh

enum class Side { supply, demand };
enum class BidsMode { all, accepted };

struct BidRecord {
  Zone zone = Zone::NORD;
  CivilDate date;
  int hour = 1;  // settlement period 1..24
  Side side = Side::supply;
  double price = 0.0;     // EUR/MWh; price-taking demand maps to the cap
  double quantity = 0.0;  // MWh, > 0
};

struct LedgerStats {
  long rows_total = 0;
  long parsed = 0;
  long skipped_malformed = 0;
  long skipped_zero_quantity = 0;
  long skipped_rejected = 0;
  long skipped_off_calendar = 0;  // e.g. Feb 29 rows in a leap market year
};

// Monotone cumulative price-quantity staircase for one zone-hour and side.
// Supply: prices nondecreasing along increasing cumulative quantity.
// Demand: prices nonincreasing. Empty points = degenerate hour.
struct StepCurve {
  struct Step {
    double price = 0.0;
    double cum_quantity = 0.0;
  };
  Side side = Side::supply;
  std::vector<Step> points;

  bool empty() const { return points.empty(); }
  double total_quantity() const {
    return points.empty() ? 0.0 : points.back().cum_quantity;
  }

  void check_invariants() const {
    double prev_q = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
      if (points[i].cum_quantity <= prev_q)
        throw DataError("StepCurve: cumulative quantity not strictly increasing");
      prev_q = points[i].cum_quantity;
      if (i > 0) {
        bool ok = side == Side::supply
                      ? points[i].price >= points[i - 1].price
                      : points[i].price <= points[i - 1].price;
        if (!ok) throw DataError("StepCurve: price monotonicity violated");
      }
    }
  }

  // Cumulative quantity available at price p: supply priced <= p, demand
  // priced >= p.
  double quantity_at(double p) const {
    double q = 0.0;
    for (const auto& s : points) {
      bool in = side == Side::supply ? s.price <= p : s.price >= p;
      if (in)
        q = s.cum_quantity;
      else
        break;
    }
    return q;
  }
};

enum class CrossingKind { interior, vertical_overlap, horizontal_overlap, no_cross };

inline std::string_view to_string(CrossingKind k) {
  switch (k) {
    case CrossingKind::interior: return "interior";
    case CrossingKind::vertical_overlap: return "vertical-overlap";
    case CrossingKind::horizontal_overlap: return "horizontal-overlap";
    case CrossingKind::no_cross: return "no-cross";
  }
  return "?";
}

inline std::optional<CrossingKind> parse_crossing_kind(std::string_view s) {
  for (auto k : {CrossingKind::interior, CrossingKind::vertical_overlap,
                 CrossingKind::horizontal_overlap, CrossingKind::no_cross})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct Equilibrium {
  std::optional<double> price;  // absent when the curves do not cross
  double quantity = 0.0;
  CrossingKind crossing_kind = CrossingKind::no_cross;
};

struct ShiftAmounts {
  double delta_demand = 0.0;  // zone-hour self-consumption, MWh
  double delta_supply = 0.0;  // zone-hour injection, MWh
};

// Sorts one zone-hour's bids into a merit-order staircase; equal-price bids
// merge into a single step.
inline StepCurve build_curve(const std::vector<BidRecord>& bids, Side side) {
  StepCurve curve;
  curve.side = side;
  if (bids.empty()) return curve;

  std::vector<std::pair<double, double>> sorted;  // price, quantity
  sorted.reserve(bids.size());
  for (const auto& b : bids) sorted.emplace_back(b.price, b.quantity);
  if (side == Side::supply)
    std::sort(sorted.begin(), sorted.end(),
              [](auto& a, auto& b) { return a.first < b.first; });
  else
    std::sort(sorted.begin(), sorted.end(),
              [](auto& a, auto& b) { return a.first > b.first; });

  double cum = 0.0;
  for (const auto& [price, qty] : sorted) {
    cum += qty;
    if (!curve.points.empty() && curve.points.back().price == price)
      curve.points.back().cum_quantity = cum;
    else
      curve.points.push_back({price, cum});
  }
  curve.check_invariants();
  return curve;
}

// Uniform-price intersection. The traded volume at price p is
// min(S(p), D(p)); the clearing quantity maximizes it and the clearing price
// is the lowest supply step price achieving that quantity (the marginal ask).
inline Equilibrium clear(const StepCurve& supply, const StepCurve& demand) {
  if (supply.empty() || demand.empty())
    throw DataError("clear: empty curve");

  // Demand's best price below the cheapest ask: no trade is possible.
  if (demand.points.front().price < supply.points.front().price)
    return {std::nullopt, 0.0, CrossingKind::no_cross};

  // The maximum of min(S, D) is attained at a supply step price: between
  // supply jumps S is constant while D only falls.
  double best_q = 0.0;
  double best_price = supply.points.front().price;
  for (const auto& s : supply.points) {
    double traded = std::min(supply.quantity_at(s.price),
                             demand.quantity_at(s.price));
    if (traded > best_q) {
      best_q = traded;
      best_price = s.price;
    }
  }
  if (best_q <= 0.0) return {std::nullopt, 0.0, CrossingKind::no_cross};

  const double s_at = supply.quantity_at(best_price);
  const double d_at = demand.quantity_at(best_price);
  CrossingKind kind;
  if (d_at > s_at) {
    // Demand still unserved at the marginal ask: the crossing sits on the
    // supply riser between two step prices.
    kind = CrossingKind::vertical_overlap;
  } else if (s_at > d_at) {
    kind = CrossingKind::interior;
  } else {
    bool demand_step_here = false;
    for (const auto& d : demand.points)
      if (d.price == best_price) demand_step_here = true;
    kind = demand_step_here ? CrossingKind::horizontal_overlap
                            : CrossingKind::interior;
  }
  return {best_price, best_q, kind};
}

// D_synt(Pr) = D(Pr) + delta: realized by prepending a price-taking block at
// the cap, which raises every cumulative quantity by delta.
inline StepCurve shift_demand_right(const StepCurve& demand, double delta,
                                    double price_cap = kDefaultPriceCap) {
  if (delta < 0) throw DataError("shift_demand_right: negative delta");
  StepCurve out = demand;
  if (delta == 0.0) return out;
  for (auto& p : out.points) p.cum_quantity += delta;
  if (!out.points.empty() && out.points.front().price >= price_cap) {
    // Existing price-taking block already covers the shift.
  } else {
    out.points.insert(out.points.begin(), {price_cap, delta});
  }
  out.check_invariants();
  return out;
}

enum class SupplyRemoval {
  cheapest_first,   // clamp from the low-price end of the merit order
  zero_price_only,  // remove only zero-priced quantity; error if insufficient
};

// S_synt(Pr) = S(Pr) - delta with clamping at zero: capacity leaves the cheap
// end of the merit order first.
inline StepCurve shift_supply_left(
    const StepCurve& supply, double delta,
    SupplyRemoval policy = SupplyRemoval::cheapest_first) {
  if (delta < 0) throw DataError("shift_supply_left: negative delta");
  StepCurve out;
  out.side = supply.side;
  if (delta == 0.0) {
    out = supply;
    return out;
  }

  if (policy == SupplyRemoval::zero_price_only) {
    double zero_qty = 0.0;
    for (const auto& p : supply.points)
      if (p.price == 0.0) zero_qty = p.cum_quantity;
    if (zero_qty < delta) {
      std::ostringstream msg;
      msg << "shift_supply_left: zero-price quantity " << zero_qty
          << " MWh is insufficient for delta " << delta << " MWh";
      throw DataError(msg.str());
    }
  }

  for (const auto& p : supply.points) {
    double q = p.cum_quantity - delta;
    if (q > 0.0) out.points.push_back({p.price, q});
  }
  // delta >= total supply: empty-curve marker, caller reports the hour.
  if (!out.points.empty()) out.check_invariants();
  return out;
}

inline std::pair<Equilibrium, Equilibrium> counterfactual_clear(
    const StepCurve& supply, const StepCurve& demand,
    const ShiftAmounts& shifts, double price_cap = kDefaultPriceCap,
    SupplyRemoval policy = SupplyRemoval::cheapest_first) {
  Equilibrium actual = clear(supply, demand);
  StepCurve supply_synt = shift_supply_left(supply, shifts.delta_supply, policy);
  StepCurve demand_synt =
      shift_demand_right(demand, shifts.delta_demand, price_cap);
  if (supply_synt.empty())
    return {actual, {std::nullopt, 0.0, CrossingKind::no_cross}};
  Equilibrium synthetic = clear(supply_synt, demand_synt);
  return {actual, synthetic};
}

// Ledger schema: date, hour, zone, side, price_eur_mwh, quantity_mwh, status.
// Dirty rows are skipped and counted, never fatal; a missing column is.
inline std::vector<BidRecord> parse_bid_ledger(
    const std::string& path, LedgerStats& stats,
    BidsMode mode = BidsMode::all, double price_cap = kDefaultPriceCap,
    std::vector<std::string>* row_errors = nullptr) {
  csv::Table t(path);
  t.require_columns(
      {"date", "hour", "zone", "side", "price_eur_mwh", "quantity_mwh", "status"},
      path);

  std::vector<BidRecord> out;
  out.reserve(t.row_count());
  auto note = [&](size_t row, const std::string& why) {
    if (row_errors)
      row_errors->push_back(path + ":" + std::to_string(row + 2) + ": " + why);
  };

  for (size_t i = 0; i < t.row_count(); ++i) {
    ++stats.rows_total;
    BidRecord b;

    auto date = parse_date(t.cell(i, "date"));
    auto hour = csv::parse_long(t.cell(i, "hour"));
    auto zone = parse_zone(t.cell(i, "zone"));
    auto qty = csv::parse_double(t.cell(i, "quantity_mwh"));
    std::string side_s = t.cell(i, "side");
    std::string price_s = t.cell(i, "price_eur_mwh");
    std::string status = t.cell(i, "status");

    if (!date || !hour || *hour < 1 || *hour > 24 || !zone || !qty ||
        (side_s != "supply" && side_s != "demand")) {
      ++stats.skipped_malformed;
      note(i, "malformed row");
      continue;
    }
    if (!day_of_year(date->month, date->day)) {
      ++stats.skipped_off_calendar;
      note(i, "date outside the 8760-hour calendar");
      continue;
    }
    b.date = *date;
    b.hour = static_cast<int>(*hour);
    b.zone = *zone;
    b.side = side_s == "supply" ? Side::supply : Side::demand;

    if (*qty < 0) {
      ++stats.skipped_malformed;
      note(i, "negative quantity");
      continue;
    }
    if (*qty == 0.0) {
      ++stats.skipped_zero_quantity;
      continue;
    }
    b.quantity = *qty;

    // Empty price or "PT" on a demand bid marks a price-taking order.
    if (b.side == Side::demand && (price_s.empty() || price_s == "PT")) {
      b.price = price_cap;
    } else {
      auto price = csv::parse_double(price_s);
      if (!price || *price < 0 || *price > price_cap) {
        ++stats.skipped_malformed;
        note(i, "price missing or outside [0, cap]");
        continue;
      }
      b.price = *price;
    }

    if (status == "rejected") {
      if (mode == BidsMode::accepted) {
        ++stats.skipped_rejected;
        continue;
      }
    } else if (status != "accepted" && !status.empty()) {
      ++stats.skipped_malformed;
      note(i, "unknown status '" + status + "'");
      continue;
    }

    ++stats.parsed;
    out.push_back(b);
  }
  return out;
}

}  // namespace recmerit
