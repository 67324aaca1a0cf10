#include "ce/solver.hpp"

#include <algorithm>
#include <cmath>

namespace ce {

namespace {

struct VecPair {
  PayoffVector payoffs;  // full-length, zeros at removed indices
  PriceVector prices;
  bool ready = false;
};

// Memoized mutual recursion over submarkets. Keys are (buyer mask, good
// mask); the two sides share one table each. Base cases: no buyers -> all
// prices 0; no goods -> all payoffs 0.
class InductiveSolver {
 public:
  InductiveSolver(const Market& m, const SolveOptions& opts) : m_(m) {
    n_ = m.num_buyers();
    g_ = m.num_goods();
    if (n_ + g_ > opts.max_market_size)
      throw SizeLimit("market exceeds the inductive solve size cap");
    lowest_.resize(size_t{1} << (n_ + g_));
    highest_.resize(size_t{1} << (n_ + g_));
  }

  uint32_t full_buyers() const { return (uint32_t{1} << n_) - 1; }
  uint32_t full_goods() const { return (uint32_t{1} << g_) - 1; }

  const VecPair& lowest(uint32_t buyers, uint32_t goods) {
    VecPair& e = lowest_[key(buyers, goods)];
    if (e.ready) return e;
    e.payoffs.assign(n_, 0.0);
    e.prices.assign(g_, 0.0);
    if (buyers != 0 && goods != 0) {
      for (int i = 0; i < n_; ++i) {
        if (!(buyers >> i & 1)) continue;
        const VecPair& h = highest(buyers & ~(uint32_t{1} << i), goods);
        e.payoffs[i] = best_payoff(i, goods, h.prices);
      }
      fill_induced_prices(buyers, goods, e.payoffs, e.prices);
    }
    e.ready = true;
    return e;
  }

  const VecPair& highest(uint32_t buyers, uint32_t goods) {
    VecPair& e = highest_[key(buyers, goods)];
    if (e.ready) return e;
    e.payoffs.assign(n_, 0.0);
    e.prices.assign(g_, 0.0);
    if (buyers != 0 && goods != 0) {
      for (int j = 0; j < g_; ++j) {
        if (!(goods >> j & 1)) continue;
        const VecPair& l = lowest(buyers, goods & ~(uint32_t{1} << j));
        e.prices[j] = best_price(j, buyers, l.payoffs);
      }
      for (int i = 0; i < n_; ++i)
        if (buyers >> i & 1) e.payoffs[i] = best_payoff(i, goods, e.prices);
    }
    e.ready = true;
    return e;
  }

 private:
  size_t key(uint32_t buyers, uint32_t goods) const {
    return (size_t{buyers} << g_) | goods;
  }

  double best_payoff(int i, uint32_t goods, const PriceVector& p) const {
    double best = 0.0;
    for (int j = 0; j < g_; ++j)
      if (goods >> j & 1)
        best = std::max(best, m_.at(i, j).evaluate_extended(p[j]));
    return best;
  }

  double best_price(int j, uint32_t buyers, const PayoffVector& u) const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i)
      if (buyers >> i & 1) best = std::max(best, m_.at(i, j).invert(u[i]));
    return best;
  }

  void fill_induced_prices(uint32_t buyers, uint32_t goods,
                           const PayoffVector& u, PriceVector& p) const {
    for (int j = 0; j < g_; ++j)
      if (goods >> j & 1) p[j] = best_price(j, buyers, u);
  }

  const Market& m_;
  int n_ = 0, g_ = 0;
  std::vector<VecPair> lowest_, highest_;
};

// Used by both the public solvers and the bounded solve (which needs the
// vectors of a temporary shifted market but a matching in the original one).
VecPair solve_vectors(const Market& market, const SolveOptions& opts,
                      bool lowest_side) {
  InductiveSolver s(market, opts);
  return lowest_side ? s.lowest(s.full_buyers(), s.full_goods())
                     : s.highest(s.full_buyers(), s.full_goods());
}

struct TightAdjacency {
  std::vector<std::vector<int>> buyer_goods;  // tight goods per buyer
  std::vector<std::vector<int>> good_buyers;  // tight buyers per good
};

TightAdjacency tight_adjacency(const Market& market, const PriceVector& prices,
                               const PayoffVector& payoffs, double tol) {
  TightAdjacency a;
  a.buyer_goods.resize(market.num_buyers());
  a.good_buyers.resize(market.num_goods());
  for (int i = 0; i < market.num_buyers(); ++i) {
    for (int j = 0; j < market.num_goods(); ++j) {
      double v = market.at(i, j).evaluate_extended(prices[j]);
      if (std::abs(payoffs[i] - v) <= tol) {
        a.buyer_goods[i].push_back(j);
        a.good_buyers[j].push_back(i);
      }
    }
  }
  return a;
}

// Coverage only binds the required vertices (positive payoff / positive
// price), so the alternating search may steal a partner outright when its
// current match does not need to stay covered.
bool augment_from_buyer(const TightAdjacency& adj, int buyer,
                        std::vector<int>& b2g, std::vector<int>& g2b,
                        const std::vector<char>& required_buyer,
                        std::vector<char>& seen_good) {
  for (int j : adj.buyer_goods[buyer]) {
    if (seen_good[j]) continue;
    seen_good[j] = 1;
    int owner = g2b[j];
    bool can_take = owner < 0;
    if (!can_take && !required_buyer[owner]) {
      b2g[owner] = -1;
      can_take = true;
    }
    if (!can_take)
      can_take =
          augment_from_buyer(adj, owner, b2g, g2b, required_buyer, seen_good);
    if (can_take) {
      b2g[buyer] = j;
      g2b[j] = buyer;
      return true;
    }
  }
  return false;
}

bool augment_from_good(const TightAdjacency& adj, int good,
                       std::vector<int>& b2g, std::vector<int>& g2b,
                       const std::vector<char>& required_good,
                       std::vector<char>& seen_buyer) {
  for (int i : adj.good_buyers[good]) {
    if (seen_buyer[i]) continue;
    seen_buyer[i] = 1;
    int owned = b2g[i];
    bool can_take = owned < 0;
    if (!can_take && !required_good[owned]) {
      g2b[owned] = -1;
      can_take = true;
    }
    if (!can_take)
      can_take =
          augment_from_good(adj, owned, b2g, g2b, required_good, seen_buyer);
    if (can_take) {
      b2g[i] = good;
      g2b[good] = i;
      return true;
    }
  }
  return false;
}

}  // namespace

Matching supporting_matching(const Market& market, const PriceVector& prices,
                             const PayoffVector& payoffs, double tol) {
  const int n = market.num_buyers();
  const int g = market.num_goods();
  TightAdjacency adj = tight_adjacency(market, prices, payoffs, tol);
  std::vector<char> required_buyer(n, 0), required_good(g, 0);
  for (int i = 0; i < n; ++i) required_buyer[i] = payoffs[i] > tol;
  for (int j = 0; j < g; ++j) required_good[j] = prices[j] > tol;
  std::vector<int> b2g(n, -1), g2b(g, -1);
  for (int i = 0; i < n; ++i) {
    if (!required_buyer[i]) continue;
    std::vector<char> seen(g, 0);
    if (!augment_from_buyer(adj, i, b2g, g2b, required_buyer, seen))
      throw MatchingFailure("no tight matching covers buyer " +
                            market.buyers()[i]);
  }
  for (int j = 0; j < g; ++j) {
    if (!required_good[j] || g2b[j] >= 0) continue;
    std::vector<char> seen(n, 0);
    if (!augment_from_good(adj, j, b2g, g2b, required_good, seen))
      throw MatchingFailure("no tight matching covers good " +
                            market.goods()[j]);
  }
  Matching m(n);
  m.buyer_to_good = std::move(b2g);
  return m;
}

Equilibrium solve_lowest(const Market& market, const SolveOptions& opts) {
  VecPair v = solve_vectors(market, opts, /*lowest_side=*/true);
  Matching mu = supporting_matching(market, v.prices, v.payoffs);
  return Equilibrium{&market, std::move(v.prices), std::move(v.payoffs),
                     std::move(mu)};
}

Equilibrium solve_highest(const Market& market, const SolveOptions& opts) {
  VecPair v = solve_vectors(market, opts, /*lowest_side=*/false);
  Matching mu = supporting_matching(market, v.prices, v.payoffs);
  return Equilibrium{&market, std::move(v.prices), std::move(v.payoffs),
                     std::move(mu)};
}

std::vector<PathNode> critical_alternating_path(const Equilibrium& eq,
                                                int start_good) {
  const Market& m = *eq.market;
  const int n = m.num_buyers();
  const int g = m.num_goods();
  std::vector<int> inv = eq.matching.good_to_buyer(g);
  if (inv[start_good] < 0) return {{true, start_good}};
  if (eq.payoffs[inv[start_good]] <= kEpsEq)
    return {{true, start_good}, {false, inv[start_good]}};

  TightGraph tg = tight_graph(eq);
  std::vector<char> in_t(g, 0), in_s(n, 0);
  std::vector<int> s_order;             // buyers in insertion order
  std::vector<int> prev_buyer(g, -1);   // buyer whose tight edge found a good
  in_t[start_good] = 1;
  in_s[inv[start_good]] = 1;
  s_order.push_back(inv[start_good]);

  auto build_path = [&](int last_buyer, int last_good) {
    // Walk back along matched pairs to the start good.
    std::vector<PathNode> rev;
    if (last_good >= 0 && inv[last_good] >= 0 &&
        eq.payoffs[inv[last_good]] <= kEpsEq)
      rev.push_back({false, inv[last_good]});
    rev.push_back({true, last_good});
    int b = last_buyer;
    while (b >= 0) {
      rev.push_back({false, b});
      int jb = eq.matching.good_of(b);
      rev.push_back({true, jb});
      b = prev_buyer[jb];
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
  };

  // Each pass either terminates or grows (S, T) by one matched pair, so at
  // most |I| - 1 passes are needed.
  for (int pass = 0; pass < n; ++pass) {
    bool grew = false;
    for (size_t si = 0; si < s_order.size() && !grew; ++si) {
      int i = s_order[si];
      for (int j = 0; j < g; ++j) {
        if (in_t[j] || !tg.tight(i, j)) continue;
        if (inv[j] < 0 || eq.payoffs[inv[j]] <= kEpsEq)
          return build_path(i, j);
        in_t[j] = 1;
        prev_buyer[j] = i;
        in_s[inv[j]] = 1;
        s_order.push_back(inv[j]);
        grew = true;
        break;
      }
    }
    if (!grew)
      throw PathNotFound(
          "no tight alternating path to a zero-payoff buyer or unmatched "
          "good; input is not a highest equilibrium");
  }
  throw PathNotFound("alternating path search exceeded its iteration bound");
}

std::vector<PathNode> critical_alternating_path_from_buyer(
    const Equilibrium& eq, int start_buyer) {
  const Market& m = *eq.market;
  const int n = m.num_buyers();
  const int g = m.num_goods();
  std::vector<int> inv = eq.matching.good_to_buyer(g);
  if (!eq.matching.is_matched(start_buyer)) return {{false, start_buyer}};
  int j0 = eq.matching.good_of(start_buyer);
  if (eq.prices[j0] <= kEpsEq)
    return {{false, start_buyer}, {true, j0}};

  TightGraph tg = tight_graph(eq);
  std::vector<char> in_t(g, 0), in_s(n, 0);
  std::vector<int> t_order;
  std::vector<int> prev_good(n, -1);  // good whose tight edge found a buyer
  in_s[start_buyer] = 1;
  in_t[j0] = 1;
  t_order.push_back(j0);

  auto build_path = [&](int last_good, int last_buyer) {
    std::vector<PathNode> rev;
    if (last_buyer >= 0 && eq.matching.is_matched(last_buyer) &&
        eq.prices[eq.matching.good_of(last_buyer)] <= kEpsEq)
      rev.push_back({true, eq.matching.good_of(last_buyer)});
    rev.push_back({false, last_buyer});
    int j = last_good;
    while (j >= 0) {
      rev.push_back({true, j});
      int ij = inv[j];
      rev.push_back({false, ij});
      j = prev_good[ij];
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
  };

  for (int pass = 0; pass < g; ++pass) {
    bool grew = false;
    for (size_t ti = 0; ti < t_order.size() && !grew; ++ti) {
      int j = t_order[ti];
      for (int i = 0; i < n; ++i) {
        if (in_s[i] || !tg.tight(i, j)) continue;
        if (!eq.matching.is_matched(i) ||
            eq.prices[eq.matching.good_of(i)] <= kEpsEq)
          return build_path(j, i);
        in_s[i] = 1;
        prev_good[i] = j;
        in_t[eq.matching.good_of(i)] = 1;
        t_order.push_back(eq.matching.good_of(i));
        grew = true;
        break;
      }
    }
    if (!grew)
      throw PathNotFound(
          "no tight alternating path to a zero-price good or unmatched "
          "buyer; input is not a lowest equilibrium");
  }
  throw PathNotFound("alternating path search exceeded its iteration bound");
}

Equilibrium insert_buyer(const Equilibrium& eq_without, const Market& market,
                         int buyer) {
  const Market& sub = *eq_without.market;
  if (sub.num_buyers() != market.num_buyers() - 1 ||
      sub.num_goods() != market.num_goods())
    throw MarketMismatch("equilibrium is not of the market minus the buyer");
  const int n = market.num_buyers();
  const int g = market.num_goods();
  auto to_full = [&](int k) { return k < buyer ? k : k + 1; };

  PriceVector prices = eq_without.prices;
  double best = 0.0;
  int best_good = -1;
  for (int j = 0; j < g; ++j) {
    double v = market.at(buyer, j).evaluate_extended(prices[j]);
    if (v > best) {
      best = v;
      best_good = j;
    }
  }

  PayoffVector payoffs(n, 0.0);
  Matching matching(n);
  for (int k = 0; k < sub.num_buyers(); ++k) {
    payoffs[to_full(k)] = eq_without.payoffs[k];
    matching.buyer_to_good[to_full(k)] = eq_without.matching.good_of(k);
  }
  payoffs[buyer] = best;

  if (best > kEpsEq) {
    std::vector<PathNode> path =
        critical_alternating_path(eq_without, best_good);
    // Flip: every matched buyer on the path moves to the next good; a
    // terminal zero-payoff buyer ends up unmatched.
    for (size_t t = 1; t < path.size(); ++t) {
      if (path[t].is_good) continue;
      int b_full = to_full(path[t].index);
      if (t + 1 < path.size())
        matching.buyer_to_good[b_full] = path[t + 1].index;
      else
        matching.buyer_to_good[b_full] = -1;
    }
    matching.buyer_to_good[buyer] = best_good;
  }
  return Equilibrium{&market, std::move(prices), std::move(payoffs),
                     std::move(matching)};
}

std::optional<Equilibrium> solve_lowest_bounded(const Market& market,
                                                const BoundEnvelope& bounds,
                                                const SolveOptions& opts) {
  const int n = market.num_buyers();
  const int g = market.num_goods();
  if (static_cast<int>(bounds.price_lower.size()) != g ||
      static_cast<int>(bounds.payoff_lower.size()) != n)
    throw ValidationError("bound envelope does not match market dimensions");
  for (double b : bounds.price_lower)
    if (b < 0.0) throw ValidationError("price bounds must be nonnegative");
  for (double b : bounds.payoff_lower)
    if (b < 0.0) throw ValidationError("payoff bounds must be nonnegative");

  std::vector<UtilitySpec> shifted;
  shifted.reserve(static_cast<size_t>(n) * g);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < g; ++j)
      shifted.push_back(shift_for_bounds(market.at(i, j),
                                         bounds.price_lower[j],
                                         bounds.payoff_lower[i]));
  Market transformed(market.buyers(), market.goods(), std::move(shifted));

  VecPair v = solve_vectors(transformed, opts, /*lowest_side=*/true);
  PriceVector prices(g);
  PayoffVector payoffs(n);
  for (int j = 0; j < g; ++j) prices[j] = v.prices[j] + bounds.price_lower[j];
  for (int i = 0; i < n; ++i)
    payoffs[i] = v.payoffs[i] + bounds.payoff_lower[i];

  Equilibrium eq{&market, std::move(prices), std::move(payoffs), Matching(n)};
  try {
    eq.matching = supporting_matching(market, eq.prices, eq.payoffs);
  } catch (const MatchingFailure&) {
    return std::nullopt;
  }
  if (!verify_equilibrium(eq).pass) return std::nullopt;
  return eq;
}

}  // namespace ce
