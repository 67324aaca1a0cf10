#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ce/utility.hpp"

namespace ce {

using PriceVector = std::vector<double>;    // per good, >= 0
using PayoffVector = std::vector<double>;   // per buyer, >= 0

// One-to-one assignment of goods to buyers; -1 means unmatched.
struct Matching {
  std::vector<int> buyer_to_good;

  Matching() = default;
  explicit Matching(int num_buyers) : buyer_to_good(num_buyers, -1) {}

  int good_of(int buyer) const { return buyer_to_good[buyer]; }
  bool is_matched(int buyer) const { return buyer_to_good[buyer] >= 0; }
  // Inverse map, -1 for unmatched goods. Throws ValidationError if a good is
  // assigned twice.
  std::vector<int> good_to_buyer(int num_goods) const;

  bool operator==(const Matching&) const = default;
};

// A unit-demand market: buyers, goods, and the full matrix of utility
// curves. Immutable after construction; all operations on it are pure.
class Market {
 public:
  Market() = default;
  Market(std::vector<std::string> buyers, std::vector<std::string> goods,
         std::vector<UtilitySpec> utilities_row_major);

  int num_buyers() const { return static_cast<int>(buyers_.size()); }
  int num_goods() const { return static_cast<int>(goods_.size()); }
  const std::vector<std::string>& buyers() const { return buyers_; }
  const std::vector<std::string>& goods() const { return goods_; }
  const UtilitySpec& at(int buyer, int good) const {
    return utilities_[static_cast<size_t>(buyer) * goods_.size() + good];
  }

  // Checks id uniqueness and validates every curve.
  ValidationResult validate() const;

  Market remove_buyer(int buyer) const;
  Market remove_good(int good) const;
  // Square market per the dummy construction: |J| dummy buyers and |I| dummy
  // goods with u(x) = -x on every edge touching a dummy. Dummies sit at
  // price/payoff 0 in every equilibrium, so results restrict cleanly.
  Market padded_square() const;

  bool all_quasilinear() const;

 private:
  std::vector<std::string> buyers_;
  std::vector<std::string> goods_;
  std::vector<UtilitySpec> utilities_;  // row-major (buyer, good)
};

struct Equilibrium {
  const Market* market = nullptr;
  PriceVector prices;
  PayoffVector payoffs;
  Matching matching;
};

// Best payoff each buyer can get at the given prices (the outside option 0
// included). Total: prices past a curve's domain count as nonpositive
// utility via the extended evaluation.
PayoffVector induced_payoffs(const Market& market, const PriceVector& prices);

// Per good, the highest price any buyer's curve supports at her payoff,
// floored at 0.
PriceVector induced_prices(const Market& market, const PayoffVector& payoffs);

// Goods demanded by some buyer in `buyer_subset` at the given prices: the
// goods achieving that buyer's induced payoff within kEpsEq (ties at payoff
// 0 count). Result sorted ascending.
std::vector<int> demand_set_of_buyers(const Market& market,
                                      const PriceVector& prices,
                                      const std::vector<int>& buyer_subset);

// Buyers whose raw inverse at their payoff attains the induced price of some
// good in `good_subset` within kEpsEq. Result sorted ascending.
std::vector<int> demand_set_of_goods(const Market& market,
                                     const PayoffVector& payoffs,
                                     const std::vector<int>& good_subset);

enum class Condition {
  MatchedPairPayoff,       // matched buyer's payoff equals her curve value
  NoEnvy,                  // no buyer prefers another good at these prices
  UnmatchedBuyerPayoff,    // unmatched buyers have payoff 0
  UnmatchedGoodPrice,      // unmatched goods have price 0
  NonnegativePayoff,
  NonnegativePrice,
};

const char* condition_name(Condition c);

struct Violation {
  Condition condition;
  int buyer;   // -1 when not applicable
  int good;    // -1 when not applicable
  double magnitude;
};

struct VerifyReport {
  bool pass = true;
  std::vector<Violation> violations;  // ordered by (condition, buyer, good)
};

// Checks the four equilibrium conditions at the given tolerance and reports
// every violation.
VerifyReport verify_equilibrium(const Equilibrium& eq, double tol = kEpsEq);

// Bipartite graph of buyer-good pairs whose curve value at the good's price
// matches the buyer's payoff within kEpsEq; matching edges flagged.
struct TightGraph {
  int num_buyers = 0;
  int num_goods = 0;
  std::vector<uint64_t> buyer_tight;  // bitmask over goods per buyer
  std::vector<int> matched_good;      // from the source equilibrium

  bool tight(int buyer, int good) const {
    return (buyer_tight[buyer] >> good) & 1u;
  }
  bool is_matching_edge(int buyer, int good) const {
    return matched_good[buyer] == good;
  }
};

TightGraph tight_graph(const Equilibrium& eq);

}  // namespace ce
