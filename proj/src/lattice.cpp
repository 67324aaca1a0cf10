#include "ce/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace ce {

namespace {

void require_same_market(const Equilibrium& a, const Equilibrium& b) {
  if (a.market == nullptr || a.market != b.market)
    throw MarketMismatch("lattice operation on equilibria of different markets");
}

}  // namespace

Equilibrium meet(const Equilibrium& a, const Equilibrium& b) {
  require_same_market(a, b);
  const int n = a.market->num_buyers();
  const int g = a.market->num_goods();
  Equilibrium out;
  out.market = a.market;
  out.prices.resize(g);
  out.payoffs.resize(n);
  out.matching = Matching(n);
  for (int j = 0; j < g; ++j) out.prices[j] = std::min(a.prices[j], b.prices[j]);
  for (int i = 0; i < n; ++i) {
    out.payoffs[i] = std::max(a.payoffs[i], b.payoffs[i]);
    out.matching.buyer_to_good[i] = a.payoffs[i] >= b.payoffs[i]
                                        ? a.matching.good_of(i)
                                        : b.matching.good_of(i);
  }
  out.matching.good_to_buyer(g);  // surfaces a conflicting assignment early
  return out;
}

Equilibrium join(const Equilibrium& a, const Equilibrium& b) {
  require_same_market(a, b);
  const int n = a.market->num_buyers();
  const int g = a.market->num_goods();
  Equilibrium out;
  out.market = a.market;
  out.prices.resize(g);
  out.payoffs.resize(n);
  out.matching = Matching(n);
  for (int j = 0; j < g; ++j) out.prices[j] = std::max(a.prices[j], b.prices[j]);
  for (int i = 0; i < n; ++i) {
    out.payoffs[i] = std::min(a.payoffs[i], b.payoffs[i]);
    out.matching.buyer_to_good[i] = a.payoffs[i] < b.payoffs[i]
                                        ? a.matching.good_of(i)
                                        : b.matching.good_of(i);
  }
  out.matching.good_to_buyer(g);
  return out;
}

Equilibrium interpolate_continuum(const Market& market, double t,
                                  const SolveOptions& opts) {
  if (!(t >= 0.0 && t <= 1.0))
    throw ValidationError("continuum parameter must be in [0, 1]");
  const int n = market.num_buyers();
  const int g = market.num_goods();

  Market padded = market.padded_square();
  Equilibrium low = solve_lowest(padded, opts);
  Equilibrium high = solve_highest(padded, opts);

  BoundEnvelope bounds;
  bounds.payoff_lower.assign(padded.num_buyers(), 0.0);
  bounds.price_lower.resize(padded.num_goods());
  for (int j = 0; j < padded.num_goods(); ++j)
    bounds.price_lower[j] = (1.0 - t) * low.prices[j] + t * high.prices[j];

  std::optional<Equilibrium> bounded =
      solve_lowest_bounded(padded, bounds, opts);
  if (!bounded)
    throw Error("interpolated price bound unexpectedly infeasible");

  // Restrict back to the real agents; dummies sit at price/payoff 0.
  Equilibrium out;
  out.market = &market;
  out.prices.assign(bounded->prices.begin(), bounded->prices.begin() + g);
  out.payoffs.assign(bounded->payoffs.begin(), bounded->payoffs.begin() + n);
  out.matching = Matching(n);
  for (int i = 0; i < n; ++i) {
    int j = bounded->matching.good_of(i);
    out.matching.buyer_to_good[i] = j < g ? j : -1;
  }
  return out;
}

}  // namespace ce
