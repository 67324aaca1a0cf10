#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ce/market.hpp"
#include "ce/solver.hpp"
#include "ce/verification.hpp"

namespace ce {

// Matching market with agents on both sides: a transfer x from agent i to
// agent j gives i utility u_i^j(x) and j utility q_i^j(-x).
struct TwoSidedMarket {
  std::vector<std::string> side_i;
  std::vector<std::string> side_j;
  std::vector<UtilitySpec> buyer_utilities;   // row-major (i, j), of x
  std::vector<UtilitySpec> seller_utilities;  // row-major (i, j), of -x

  const UtilitySpec& buyer_at(int i, int j) const {
    return buyer_utilities[static_cast<size_t>(i) * side_j.size() + j];
  }
  const UtilitySpec& seller_at(int i, int j) const {
    return seller_utilities[static_cast<size_t>(i) * side_j.size() + j];
  }
};

// Buyer/good market whose good-j "price" is agent j's payoff: the reduced
// curve is u'(y) = u(-q^{-1}(y)), realized as a price-mapped spec. Seller
// curves must be from the piecewise-linear families (their inverses are what
// price maps can express) and give nonpositive payoff at zero transfer.
// The transfer behind payoff y is recoverable as transfer_map(i, j)(y).
Market reduce_two_sided(const TwoSidedMarket& ts);

// The map y -> -q_i^j^{-1}(y) used by the reduction.
PriceMap two_sided_transfer_map(const TwoSidedMarket& ts, int i, int j);

// Market a buyer sees under personalized prices: entry (i, j) becomes
// u_i^j(g_i^j(.)). Maps must be fixed before any report is read; this
// function only composes them.
Market discriminated_market(const Market& market,
                            const std::vector<PriceMap>& maps_row_major);

enum class AdMode { Cpc, Cpm };

// Advertiser's private value and believed clickthrough rate behind a
// standard curve: u(x) = ctr*(value - x) for CPC, u(x) = value - x for CPM.
struct StandardParams {
  double value = 0.0;
  double ctr = 1.0;
};

struct AdvertiserSpec {
  std::string id;
  AdMode mode = AdMode::Cpc;
  std::vector<UtilitySpec> slot_curves;  // of per-click (CPC) or
                                         // per-impression (CPM) price
  std::vector<std::optional<StandardParams>> standard;  // per slot
};

struct AdAuctionConfig {
  std::vector<std::string> slots;
  std::vector<AdvertiserSpec> advertisers;
  std::vector<std::vector<double>> engine_ctr;  // (advertiser, slot), (0, 1]

  ValidationResult validate() const;
};

enum class PriceUnit { PerImpression, PerClick };

struct AdAssignmentRow {
  int advertiser;
  int slot;
  double base_price;      // per impression; the engine's expected revenue
  double observed_price;  // base/ctr for CPC, base for CPM
  PriceUnit unit;
};

struct AdAuctionOutcome {
  Matching assignment;     // advertiser -> slot
  PriceVector base_prices; // per slot
  std::vector<AdAssignmentRow> rows;  // matched advertisers, ascending
};

// The personalized price maps the auction uses: x/engine_ctr for CPC rows,
// identity for CPM rows. A function of modes and engine rates only — never
// of the reported curves.
std::vector<PriceMap> ad_auction_price_maps(const AdAuctionConfig& config);

// Lowest equilibrium of the personalized-price market built from the
// config: CPC advertisers observe base/engine_ctr per click, CPM advertisers
// observe the base price per impression.
AdAuctionOutcome run_ad_auction(const AdAuctionConfig& config,
                                const SolveOptions& opts = {});

struct WelfareReport {
  double engine_revenue = 0.0;
  // Expected utility per advertiser; set only for standard advertisers who
  // agree with the engine's clickthrough rates.
  std::vector<std::optional<double>> advertiser_utility;
  double coalition_welfare = 0.0;  // engine + standard agreeing advertisers
  bool all_standard_agreeing = false;
  // Present when every advertiser is standard and agreeing: the max-weight
  // outcome on the expected-value matrix to compare against.
  std::optional<VcgOutcome> vcg;
};

WelfareReport welfare_report(const AdAuctionConfig& config,
                             const AdAuctionOutcome& outcome);

}  // namespace ce
