#include "ce/mechanisms.hpp"

#include <algorithm>
#include <cmath>

namespace ce {

namespace {

// -q^{-1} for the piecewise-linear families, as explicit breakpoints. The
// end-slope extensions reproduce the inverse exactly on all of R.
PriceMap inverse_transfer_map(const UtilitySpec& seller) {
  using Point = PriceMap::Point;
  if (seller.is_quasilinear()) {
    double v = seller.quasilinear_value();
    if (v == 0.0) return PriceMap::identity();
    return PriceMap::piecewise_linear({Point{v, 0.0}, Point{v + 1.0, 1.0}});
  }
  if (const auto* pwl =
          std::get_if<UtilitySpec::PiecewiseLinear>(&seller.node())) {
    std::vector<Point> pts;
    for (auto it = pwl->points.rbegin(); it != pwl->points.rend(); ++it)
      pts.push_back(Point{it->second, -it->first});
    return PriceMap::piecewise_linear(std::move(pts));
  }
  if (const auto* b = std::get_if<UtilitySpec::Budgeted>(&seller.node())) {
    double y_kink = b->value - b->budget;
    return PriceMap::piecewise_linear(
        {Point{y_kink - b->steep_slope, -(b->budget + 1.0)},
         Point{y_kink, -b->budget},
         Point{y_kink + 1.0, -(b->budget - 1.0)}});
  }
  throw ValidationError(
      "seller curves must be quasilinear, piecewise linear, or budgeted");
}

}  // namespace

PriceMap two_sided_transfer_map(const TwoSidedMarket& ts, int i, int j) {
  return inverse_transfer_map(ts.seller_at(i, j));
}

Market reduce_two_sided(const TwoSidedMarket& ts) {
  const int n = static_cast<int>(ts.side_i.size());
  const int m = static_cast<int>(ts.side_j.size());
  if (ts.buyer_utilities.size() != static_cast<size_t>(n) * m ||
      ts.seller_utilities.size() != static_cast<size_t>(n) * m)
    throw ValidationError("two-sided utility matrices do not match dimensions");
  std::vector<UtilitySpec> reduced;
  reduced.reserve(static_cast<size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      ValidationResult r = ts.seller_at(i, j).validate();
      if (!r.ok)
        throw ValidationError("seller curve (" + ts.side_i[i] + ", " +
                              ts.side_j[j] + "): " + r.reason);
      PriceMap map = inverse_transfer_map(ts.seller_at(i, j));
      ValidationResult mr = map.validate();
      if (!mr.ok)
        throw ValidationError("seller curve (" + ts.side_i[i] + ", " +
                              ts.side_j[j] +
                              ") gives a positive payoff at zero transfer; " +
                              mr.reason);
      reduced.push_back(map.is_identity()
                            ? ts.buyer_at(i, j)
                            : apply_price_map(ts.buyer_at(i, j), map));
    }
  }
  return Market(ts.side_i, ts.side_j, std::move(reduced));
}

Market discriminated_market(const Market& market,
                            const std::vector<PriceMap>& maps_row_major) {
  const int n = market.num_buyers();
  const int m = market.num_goods();
  if (maps_row_major.size() != static_cast<size_t>(n) * m)
    throw ValidationError("price map matrix does not match market dimensions");
  std::vector<UtilitySpec> u;
  u.reserve(maps_row_major.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const PriceMap& map = maps_row_major[static_cast<size_t>(i) * m + j];
      ValidationResult r = map.validate();
      if (!r.ok)
        throw ValidationError("price map (" + market.buyers()[i] + ", " +
                              market.goods()[j] + "): " + r.reason);
      u.push_back(map.is_identity() ? market.at(i, j)
                                    : apply_price_map(market.at(i, j), map));
    }
  }
  return Market(market.buyers(), market.goods(), std::move(u));
}

ValidationResult AdAuctionConfig::validate() const {
  const int m = static_cast<int>(slots.size());
  if (engine_ctr.size() != advertisers.size())
    return {false, "engine ctr matrix does not match advertiser count"};
  for (size_t i = 0; i < advertisers.size(); ++i) {
    const AdvertiserSpec& a = advertisers[i];
    if (static_cast<int>(a.slot_curves.size()) != m)
      return {false, "advertiser " + a.id + " curve count mismatch"};
    if (!a.standard.empty() && static_cast<int>(a.standard.size()) != m)
      return {false, "advertiser " + a.id + " standard-parameter mismatch"};
    if (static_cast<int>(engine_ctr[i].size()) != m)
      return {false, "engine ctr row for " + a.id + " has wrong length"};
    for (double c : engine_ctr[i])
      if (!(c > 0.0 && c <= 1.0))
        return {false, "engine ctr for " + a.id + " must be in (0, 1]"};
    for (int j = 0; j < m; ++j) {
      ValidationResult r = a.slot_curves[j].validate();
      if (!r.ok)
        return {false, "advertiser " + a.id + " slot " + slots[j] + ": " +
                           r.reason};
      if (!a.standard.empty() && a.standard[j]) {
        const StandardParams& sp = *a.standard[j];
        for (double x : {0.0, 0.5 * sp.value, sp.value}) {
          double want = a.mode == AdMode::Cpc ? sp.ctr * (sp.value - x)
                                              : sp.value - x;
          if (std::abs(a.slot_curves[j].evaluate_extended(x) - want) > 1e-9)
            return {false, "advertiser " + a.id + " slot " + slots[j] +
                               ": curve disagrees with its standard form"};
        }
      }
    }
  }
  return {};
}

std::vector<PriceMap> ad_auction_price_maps(const AdAuctionConfig& config) {
  const int n = static_cast<int>(config.advertisers.size());
  const int m = static_cast<int>(config.slots.size());
  std::vector<PriceMap> maps;
  maps.reserve(static_cast<size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      maps.push_back(config.advertisers[i].mode == AdMode::Cpc
                         ? PriceMap::scale(config.engine_ctr[i][j])
                         : PriceMap::identity());
  return maps;
}

AdAuctionOutcome run_ad_auction(const AdAuctionConfig& config,
                                const SolveOptions& opts) {
  ValidationResult ok = config.validate();
  if (!ok.ok) throw ValidationError(ok.reason);
  const int n = static_cast<int>(config.advertisers.size());
  const int m = static_cast<int>(config.slots.size());

  // Personalized prices are fixed by the engine's rates before any report
  // enters: per click for CPC means the base price divided by the rate.
  std::vector<PriceMap> maps = ad_auction_price_maps(config);
  std::vector<UtilitySpec> curves;
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) {
    ids.push_back(config.advertisers[i].id);
    for (int j = 0; j < m; ++j)
      curves.push_back(config.advertisers[i].slot_curves[j]);
  }
  Market reported(std::move(ids), config.slots, std::move(curves));
  Market personalized = discriminated_market(reported, maps);

  Equilibrium eq = solve_lowest(personalized, opts);
  AdAuctionOutcome out;
  out.assignment = eq.matching;
  out.base_prices = eq.prices;
  for (int i = 0; i < n; ++i) {
    int j = eq.matching.good_of(i);
    if (j < 0) continue;
    AdAssignmentRow row;
    row.advertiser = i;
    row.slot = j;
    row.base_price = eq.prices[j];
    if (config.advertisers[i].mode == AdMode::Cpc) {
      row.observed_price = eq.prices[j] / config.engine_ctr[i][j];
      row.unit = PriceUnit::PerClick;
    } else {
      row.observed_price = eq.prices[j];
      row.unit = PriceUnit::PerImpression;
    }
    out.rows.push_back(row);
  }
  return out;
}

namespace {

bool standard_and_agreeing(const AdAuctionConfig& config, int i) {
  const AdvertiserSpec& a = config.advertisers[i];
  if (a.standard.empty()) return false;
  for (size_t j = 0; j < a.standard.size(); ++j) {
    if (!a.standard[j]) return false;
    if (a.mode == AdMode::Cpc &&
        std::abs(a.standard[j]->ctr - config.engine_ctr[i][j]) > kEpsEq)
      return false;
  }
  return true;
}

}  // namespace

WelfareReport welfare_report(const AdAuctionConfig& config,
                             const AdAuctionOutcome& outcome) {
  const int n = static_cast<int>(config.advertisers.size());
  const int m = static_cast<int>(config.slots.size());
  WelfareReport rep;
  rep.advertiser_utility.assign(n, std::nullopt);
  for (const AdAssignmentRow& row : outcome.rows)
    rep.engine_revenue += row.base_price;

  rep.all_standard_agreeing = true;
  for (int i = 0; i < n; ++i) {
    if (!standard_and_agreeing(config, i)) {
      rep.all_standard_agreeing = false;
      continue;
    }
    int j = outcome.assignment.good_of(i);
    if (j < 0) {
      rep.advertiser_utility[i] = 0.0;
      continue;
    }
    const StandardParams& sp = *config.advertisers[i].standard[j];
    double expected_value = config.advertisers[i].mode == AdMode::Cpc
                                ? sp.ctr * sp.value
                                : sp.value;
    rep.advertiser_utility[i] = expected_value - outcome.base_prices[j];
  }
  rep.coalition_welfare = rep.engine_revenue;
  for (const auto& u : rep.advertiser_utility)
    if (u) rep.coalition_welfare += *u;

  if (rep.all_standard_agreeing) {
    std::vector<std::vector<double>> expected(n, std::vector<double>(m, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const StandardParams& sp = *config.advertisers[i].standard[j];
        expected[i][j] = config.advertisers[i].mode == AdMode::Cpc
                             ? sp.ctr * sp.value
                             : sp.value;
      }
    rep.vcg = vcg_oracle(expected);
  }
  return rep;
}

}  // namespace ce
