#pragma once

#include <optional>
#include <vector>

#include "ce/market.hpp"

namespace ce {

struct SolveOptions {
  // The inductive recursion memoizes over submarkets; the state count grows
  // like binom(2n, n), so solves are capped at this many agents total.
  int max_market_size = 16;
};

// Lowest competitive equilibrium: each buyer's payoff is her induced payoff
// at the prices of the highest equilibrium of the market without her; prices
// are the payoffs' induced prices; the matching covers every positive-payoff
// buyer and positive-price good with tight edges.
Equilibrium solve_lowest(const Market& market, const SolveOptions& opts = {});

// Highest competitive equilibrium, the dual construction: per-good prices
// from the lowest equilibrium of the market without that good.
Equilibrium solve_highest(const Market& market, const SolveOptions& opts = {});

// Maximum matching on the tol-tight graph covering every buyer with payoff
// > tol and every good with price > tol. Deterministic: augmenting paths
// scan buyers and goods in index order. Throws MatchingFailure when coverage
// is impossible (the vectors are not an equilibrium pair).
Matching supporting_matching(const Market& market, const PriceVector& prices,
                             const PayoffVector& payoffs, double tol = kEpsEq);

struct PathNode {
  bool is_good;
  int index;
  bool operator==(const PathNode&) const = default;
};

// Tight alternating path from a good to a zero-payoff buyer or an unmatched
// good, starting with a matching edge (or length 0 at an unmatched good).
// Exists iff `eq` is the highest equilibrium of its market; throws
// PathNotFound otherwise, which makes it usable as a falsification probe.
std::vector<PathNode> critical_alternating_path(const Equilibrium& eq,
                                                int start_good);

// Symmetric buyer-start form for the lowest equilibrium: path from a buyer
// to a zero-price good or an unmatched buyer.
std::vector<PathNode> critical_alternating_path_from_buyer(
    const Equilibrium& eq, int start_buyer);

// Re-inserts a removed buyer into the highest equilibrium of the market
// without her: prices stay, she takes her best good, and the displaced
// matching is repaired by flipping edges along a critical alternating path.
// `eq_without` must be the highest equilibrium of market.remove_buyer(buyer).
Equilibrium insert_buyer(const Equilibrium& eq_without, const Market& market,
                         int buyer);

// Componentwise lower bounds for a bounded-equilibrium solve.
struct BoundEnvelope {
  PriceVector price_lower;
  PayoffVector payoff_lower;
};

// Lowest equilibrium among those with prices >= price_lower and payoffs >=
// payoff_lower, via the shifted-market transformation
// u'(x) = u(x + price_lower_j) - payoff_lower_i. Returns nullopt when the
// mapped-back solution is not an equilibrium (no bounded equilibrium
// exists).
std::optional<Equilibrium> solve_lowest_bounded(const Market& market,
                                                const BoundEnvelope& bounds,
                                                const SolveOptions& opts = {});

}  // namespace ce
