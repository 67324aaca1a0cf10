#include "ce/auction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ce {

namespace {

constexpr double kSimAmplitudeGap = 1e-4;

// Demand sets of buyers with strictly positive induced payoff.
struct StrictDemand {
  std::vector<int> buyers;                 // buyers with positive payoff
  std::vector<std::vector<int>> goods_of;  // their best-response goods
};

StrictDemand strict_demand(const Market& market, const PriceVector& prices) {
  StrictDemand d;
  const int n = market.num_buyers();
  const int g = market.num_goods();
  for (int i = 0; i < n; ++i) {
    double best = 0.0;
    std::vector<double> val(g);
    for (int j = 0; j < g; ++j) {
      val[j] = market.at(i, j).evaluate_extended(prices[j]);
      best = std::max(best, val[j]);
    }
    if (best <= kEpsEq) continue;
    d.buyers.push_back(i);
    std::vector<int> goods;
    for (int j = 0; j < g; ++j)
      if (best - val[j] <= kEpsEq) goods.push_back(j);
    d.goods_of.push_back(std::move(goods));
  }
  return d;
}

bool augment(const StrictDemand& d, int t, std::vector<int>& good_owner,
             std::vector<char>& seen) {
  for (int j : d.goods_of[t]) {
    if (seen[j]) continue;
    seen[j] = 1;
    if (good_owner[j] < 0 || augment(d, good_owner[j], good_owner, seen)) {
      good_owner[j] = t;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<int> over_demanded_set(const Market& market,
                                   const PriceVector& prices) {
  const int g = market.num_goods();
  StrictDemand d = strict_demand(market, prices);
  std::vector<int> good_owner(g, -1);  // index into d.buyers
  std::vector<int> unmatched;
  for (size_t t = 0; t < d.buyers.size(); ++t) {
    std::vector<char> seen(g, 0);
    if (!augment(d, static_cast<int>(t), good_owner, seen))
      unmatched.push_back(static_cast<int>(t));
  }
  if (unmatched.empty()) return {};

  // Alternating closure from the first unsaturated buyer: the reachable
  // goods form a minimal over-demanded set (every one is matched, and the
  // reachable buyers demand only within it).
  std::vector<char> in_t(g, 0);
  std::vector<int> queue{unmatched.front()};
  std::vector<char> in_s(d.buyers.size(), 0);
  in_s[unmatched.front()] = 1;
  for (size_t q = 0; q < queue.size(); ++q) {
    for (int j : d.goods_of[queue[q]]) {
      if (in_t[j]) continue;
      in_t[j] = 1;
      int owner = good_owner[j];
      if (owner >= 0 && !in_s[owner]) {
        in_s[owner] = 1;
        queue.push_back(owner);
      }
    }
  }
  std::vector<int> out;
  for (int j = 0; j < g; ++j)
    if (in_t[j]) out.push_back(j);
  return out;
}

namespace {

DemandFingerprint fingerprint(const Market& market, const PriceVector& prices) {
  const int n = market.num_buyers();
  const int g = market.num_goods();
  DemandFingerprint fp(n, 0);
  for (int i = 0; i < n; ++i) {
    double best = 0.0;
    std::vector<double> val(g);
    for (int j = 0; j < g; ++j) {
      val[j] = market.at(i, j).evaluate_extended(prices[j]);
      best = std::max(best, val[j]);
    }
    if (best <= kEpsEq) continue;
    for (int j = 0; j < g; ++j)
      if (best - val[j] <= kEpsEq) fp[i] |= uint64_t{1} << j;
  }
  return fp;
}

}  // namespace

AuctionTrace run_auction(const Market& market, double step, long max_steps) {
  if (!(step > 0.0)) throw ValidationError("auction step must be positive");
  if (max_steps < 0) throw ValidationError("negative step budget");
  const int n = market.num_buyers();
  const int g = market.num_goods();
  if (g > 64) throw SizeLimit("auction limited to 64 goods");

  // Markets with oscillatory curves get a market-wide price cap slightly
  // below the smallest amplitude, keeping every evaluation well inside the
  // curves' domains.
  double cap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < g; ++j) {
      double dm = market.at(i, j).domain_max();
      if (std::isfinite(dm))
        cap = std::min(cap, dm + kOscDomainGuard - kSimAmplitudeGap);
    }
  }

  AuctionTrace trace;
  trace.num_goods = g;
  PriceVector prices(g, 0.0);
  // The discrete path ratchets around indifference manifolds, flipping the
  // raw per-step fingerprint at nearly every step there. A structure counts
  // only once it holds on consecutive steps; one-step flickers are
  // discretization noise, not demand changes.
  DemandFingerprint recognized, run_fp;
  int run_len = 0;
  for (long s = 0; s <= max_steps; ++s) {
    DemandFingerprint fp = fingerprint(market, prices);
    if (fp == run_fp) {
      ++run_len;
    } else {
      run_fp = fp;
      run_len = 1;
    }
    if (s == 0) {
      recognized = fp;
      trace.events.emplace_back(s, fp);
    } else if (run_len >= 2 && run_fp != recognized) {
      recognized = run_fp;
      ++trace.demand_change_count;
      trace.events.emplace_back(s, run_fp);
    }
    trace.samples.emplace_back(s, prices);
    if (s == max_steps) break;

    std::vector<int> over = over_demanded_set(market, prices);
    if (over.empty()) {
      trace.terminated = true;
      break;
    }
    for (int j : over) prices[j] = std::min(prices[j] + step, cap);
  }
  return trace;
}

Market example1_market(double amplitude) {
  if (amplitude < 2.0)
    throw DomainError("oscillating market needs amplitude >= 2");
  const double v = amplitude;
  const UtilitySpec all = UtilitySpec::quasilinear(v + 1.0);
  const UtilitySpec none = UtilitySpec::quasilinear(0.0);
  std::vector<UtilitySpec> u = {
      all,                              all,
      all,  // buyer 1 wants everything
      none,                             all,
      none,  // buyer 2 wants good 2 only
      none,                             none,
      all,  // buyer 3 wants good 3 only
      UtilitySpec::quasilinear(v),      UtilitySpec::oscillatory(v, false),
      UtilitySpec::oscillatory(v, true),
  };
  return Market({"b1", "b2", "b3", "b4"}, {"g1", "g2", "g3"}, std::move(u));
}

int oscillation_oracle(double amplitude, double price_cap) {
  if (!(price_cap > 0.0) || !(price_cap < amplitude))
    throw DomainError("price cap must lie in (0, amplitude)");
  const double pi = 3.14159265358979323846;
  double theta_hi = amplitude * std::log10(amplitude);
  double theta_lo = amplitude * std::log10(amplitude - price_cap);
  long hi = static_cast<long>(std::floor(theta_hi / pi));
  long lo = static_cast<long>(std::ceil(theta_lo / pi));
  return hi >= lo ? static_cast<int>(hi - lo + 1) : 0;
}

void write_trace_csv(const AuctionTrace& trace, std::ostream& out) {
  out << "step";
  for (int j = 1; j <= trace.num_goods; ++j) out << ",price_good_" << j;
  out << ",changed\n";
  size_t next_event = 1;  // events[0] is the initial fingerprint
  char buf[64];
  for (const auto& [s, prices] : trace.samples) {
    int changed = 0;
    if (next_event < trace.events.size() &&
        trace.events[next_event].first == s) {
      changed = 1;
      ++next_event;
    }
    out << s;
    for (double p : prices) {
      std::snprintf(buf, sizeof buf, ",%.9f", p);
      out << buf;
    }
    out << ',' << changed << '\n';
  }
}

}  // namespace ce
