#include "ce/market.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ce {

std::vector<int> Matching::good_to_buyer(int num_goods) const {
  std::vector<int> inv(num_goods, -1);
  for (int i = 0; i < static_cast<int>(buyer_to_good.size()); ++i) {
    int j = buyer_to_good[i];
    if (j < 0) continue;
    if (j >= num_goods)
      throw ValidationError("matching references a good out of range");
    if (inv[j] >= 0)
      throw ValidationError("matching assigns a good to two buyers");
    inv[j] = i;
  }
  return inv;
}

Market::Market(std::vector<std::string> buyers, std::vector<std::string> goods,
               std::vector<UtilitySpec> utilities_row_major)
    : buyers_(std::move(buyers)),
      goods_(std::move(goods)),
      utilities_(std::move(utilities_row_major)) {
  if (utilities_.size() != buyers_.size() * goods_.size())
    throw ValidationError("utility matrix does not match market dimensions");
}

ValidationResult Market::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& b : buyers_)
    if (!seen.insert("b:" + b).second)
      return {false, "duplicate buyer id: " + b};
  for (const auto& g : goods_)
    if (!seen.insert("g:" + g).second)
      return {false, "duplicate good id: " + g};
  for (int i = 0; i < num_buyers(); ++i) {
    for (int j = 0; j < num_goods(); ++j) {
      ValidationResult r = at(i, j).validate();
      if (!r.ok)
        return {false, "utility(" + buyers_[i] + ", " + goods_[j] +
                           "): " + r.reason};
    }
  }
  return {};
}

Market Market::remove_buyer(int buyer) const {
  std::vector<std::string> b;
  std::vector<UtilitySpec> u;
  for (int i = 0; i < num_buyers(); ++i) {
    if (i == buyer) continue;
    b.push_back(buyers_[i]);
    for (int j = 0; j < num_goods(); ++j) u.push_back(at(i, j));
  }
  return Market(std::move(b), goods_, std::move(u));
}

Market Market::remove_good(int good) const {
  std::vector<std::string> g;
  for (int j = 0; j < num_goods(); ++j)
    if (j != good) g.push_back(goods_[j]);
  std::vector<UtilitySpec> u;
  for (int i = 0; i < num_buyers(); ++i)
    for (int j = 0; j < num_goods(); ++j)
      if (j != good) u.push_back(at(i, j));
  return Market(buyers_, std::move(g), std::move(u));
}

Market Market::padded_square() const {
  const int n = num_buyers();
  const int m = num_goods();
  std::vector<std::string> b = buyers_;
  std::vector<std::string> g = goods_;
  for (int j = 0; j < m; ++j) b.push_back("dummy_buyer_" + std::to_string(j));
  for (int i = 0; i < n; ++i) g.push_back("dummy_good_" + std::to_string(i));
  const UtilitySpec dummy = UtilitySpec::quasilinear(0.0);
  std::vector<UtilitySpec> u;
  u.reserve(b.size() * g.size());
  for (int i = 0; i < n + m; ++i) {
    for (int j = 0; j < m + n; ++j) {
      if (i < n && j < m)
        u.push_back(at(i, j));
      else
        u.push_back(dummy);  // u(x) = -x on every dummy edge
    }
  }
  return Market(std::move(b), std::move(g), std::move(u));
}

bool Market::all_quasilinear() const {
  return std::all_of(utilities_.begin(), utilities_.end(),
                     [](const UtilitySpec& s) { return s.is_quasilinear(); });
}

PayoffVector induced_payoffs(const Market& market, const PriceVector& prices) {
  PayoffVector out(market.num_buyers(), 0.0);
  for (int i = 0; i < market.num_buyers(); ++i) {
    double best = 0.0;
    for (int j = 0; j < market.num_goods(); ++j)
      best = std::max(best, market.at(i, j).evaluate_extended(prices[j]));
    out[i] = best;
  }
  return out;
}

PriceVector induced_prices(const Market& market, const PayoffVector& payoffs) {
  PriceVector out(market.num_goods(), 0.0);
  for (int j = 0; j < market.num_goods(); ++j) {
    double best = 0.0;
    for (int i = 0; i < market.num_buyers(); ++i)
      best = std::max(best, market.at(i, j).invert(payoffs[i]));
    out[j] = best;
  }
  return out;
}

std::vector<int> demand_set_of_buyers(const Market& market,
                                      const PriceVector& prices,
                                      const std::vector<int>& buyer_subset) {
  if (buyer_subset.empty())
    throw ValidationError("demand set of an empty buyer subset");
  for (int i : buyer_subset)
    if (i < 0 || i >= market.num_buyers())
      throw ValidationError("buyer index out of range");
  PayoffVector u = induced_payoffs(market, prices);
  std::vector<char> in(market.num_goods(), 0);
  for (int i : buyer_subset) {
    for (int j = 0; j < market.num_goods(); ++j) {
      if (std::abs(market.at(i, j).evaluate_extended(prices[j]) - u[i]) <=
          kEpsEq)
        in[j] = 1;
    }
  }
  std::vector<int> out;
  for (int j = 0; j < market.num_goods(); ++j)
    if (in[j]) out.push_back(j);
  return out;
}

std::vector<int> demand_set_of_goods(const Market& market,
                                     const PayoffVector& payoffs,
                                     const std::vector<int>& good_subset) {
  if (good_subset.empty())
    throw ValidationError("demand set of an empty good subset");
  for (int j : good_subset)
    if (j < 0 || j >= market.num_goods())
      throw ValidationError("good index out of range");
  PriceVector p = induced_prices(market, payoffs);
  std::vector<char> in(market.num_buyers(), 0);
  for (int j : good_subset) {
    for (int i = 0; i < market.num_buyers(); ++i) {
      if (std::abs(market.at(i, j).invert(payoffs[i]) - p[j]) <= kEpsEq)
        in[i] = 1;
    }
  }
  std::vector<int> out;
  for (int i = 0; i < market.num_buyers(); ++i)
    if (in[i]) out.push_back(i);
  return out;
}

const char* condition_name(Condition c) {
  switch (c) {
    case Condition::MatchedPairPayoff: return "matched_pair_payoff";
    case Condition::NoEnvy: return "no_envy";
    case Condition::UnmatchedBuyerPayoff: return "unmatched_buyer_payoff";
    case Condition::UnmatchedGoodPrice: return "unmatched_good_price";
    case Condition::NonnegativePayoff: return "nonnegative_payoff";
    case Condition::NonnegativePrice: return "nonnegative_price";
  }
  return "?";
}

VerifyReport verify_equilibrium(const Equilibrium& eq, double tol) {
  if (eq.market == nullptr)
    throw ValidationError("equilibrium has no market reference");
  const Market& m = *eq.market;
  const int n = m.num_buyers();
  const int g = m.num_goods();
  VerifyReport rep;
  auto add = [&](Condition c, int buyer, int good, double mag) {
    rep.pass = false;
    rep.violations.push_back({c, buyer, good, mag});
  };

  std::vector<int> inv = eq.matching.good_to_buyer(g);

  for (int i = 0; i < n; ++i) {
    int j = eq.matching.good_of(i);
    if (j < 0) continue;
    double diff =
        std::abs(eq.payoffs[i] - m.at(i, j).evaluate_extended(eq.prices[j]));
    if (diff > tol) add(Condition::MatchedPairPayoff, i, j, diff);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < g; ++j) {
      double v = m.at(i, j).evaluate_extended(eq.prices[j]);
      if (eq.payoffs[i] < v - tol)
        add(Condition::NoEnvy, i, j, v - eq.payoffs[i]);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!eq.matching.is_matched(i) && std::abs(eq.payoffs[i]) > tol)
      add(Condition::UnmatchedBuyerPayoff, i, -1, std::abs(eq.payoffs[i]));
  }
  for (int j = 0; j < g; ++j) {
    if (inv[j] < 0 && std::abs(eq.prices[j]) > tol)
      add(Condition::UnmatchedGoodPrice, -1, j, std::abs(eq.prices[j]));
  }
  for (int i = 0; i < n; ++i)
    if (eq.payoffs[i] < -tol)
      add(Condition::NonnegativePayoff, i, -1, -eq.payoffs[i]);
  for (int j = 0; j < g; ++j)
    if (eq.prices[j] < -tol)
      add(Condition::NonnegativePrice, -1, j, -eq.prices[j]);
  return rep;
}

TightGraph tight_graph(const Equilibrium& eq) {
  const Market& m = *eq.market;
  TightGraph tg;
  tg.num_buyers = m.num_buyers();
  tg.num_goods = m.num_goods();
  if (tg.num_goods > 64) throw SizeLimit("tight graph limited to 64 goods");
  tg.buyer_tight.assign(tg.num_buyers, 0);
  tg.matched_good = eq.matching.buyer_to_good;
  for (int i = 0; i < tg.num_buyers; ++i) {
    for (int j = 0; j < tg.num_goods; ++j) {
      double v = m.at(i, j).evaluate_extended(eq.prices[j]);
      if (std::abs(eq.payoffs[i] - v) <= kEpsEq)
        tg.buyer_tight[i] |= (uint64_t{1} << j);
    }
  }
  return tg;
}

}  // namespace ce
