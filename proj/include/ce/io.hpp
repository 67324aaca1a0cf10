#pragma once

#include <optional>
#include <string>

#include "ce/market.hpp"
#include "ce/mechanisms.hpp"

namespace ce {

// Parsed, validated market file. Index order is document order.
struct MarketDocument {
  int schema_version = 1;
  Market market;
  std::vector<PriceMap> price_maps;  // empty, or one per (buyer, good)
  std::optional<AdAuctionConfig> ad_auction;
  std::optional<TwoSidedMarket> two_sided;
};

MarketDocument parse_market_document(const std::string& json_text);
MarketDocument load_market_document(const std::string& path);
std::string serialize_market_document(const MarketDocument& doc);

// Equilibrium files: {"side", "prices", "payoffs", "matching"} with vectors
// in document order and the matching keyed by buyer id. Numbers are printed
// with 9 decimal places.
std::string equilibrium_to_json(const Equilibrium& eq, const std::string& side);
Equilibrium equilibrium_from_json(const std::string& json_text,
                                  const Market& market);

std::string ad_outcome_to_json(const AdAuctionConfig& config,
                               const AdAuctionOutcome& outcome,
                               const WelfareReport& report);

}  // namespace ce
