#pragma once

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "ce/market.hpp"

namespace ce {

// Per-buyer sets of best-response goods at some prices; equal fingerprints
// mean the demand structure has not changed.
using DemandFingerprint = std::vector<uint64_t>;

struct AuctionTrace {
  int num_goods = 0;
  // Price vector at the start of each step; one extra row for the final
  // state when the step budget runs out.
  std::vector<std::pair<long, PriceVector>> samples;
  // Recognized demand structures with the step each was confirmed at. A
  // structure registers once it holds on two consecutive steps; one-step
  // flickers from the discrete ratcheting around ties do not count.
  // demand_change_count == events.size() - 1.
  std::vector<std::pair<long, DemandFingerprint>> events;
  bool terminated = false;
  int demand_change_count = 0;
};

// Minimal over-demanded set of goods at the given prices: a set T strictly
// demanded by more buyers than |T|, extracted from the deficiency of a
// maximum matching on the strict-demand graph. Empty when no over-demand.
std::vector<int> over_demanded_set(const Market& market,
                                   const PriceVector& prices);

// Discrete ascending auction: repeatedly raises the prices of the current
// minimal over-demanded set by `step`, re-deriving the set every step, until
// no over-demanded set remains or the step budget runs out. Oscillatory
// goods are capped slightly below their amplitude.
AuctionTrace run_auction(const Market& market, double step, long max_steps);

// The 4-buyer, 3-good market on which the ascending auction never stops:
// one buyer who wants everything, two single-good buyers, and one buyer
// whose curves on goods 2 and 3 oscillate against good 1 forever.
Market example1_market(double amplitude);

// Number of zeros of sin(V*log10(V - x)) for x in [0, price_cap], from the
// closed-form zero set V*log10(V - x) = k*pi. Ground truth for demand-change
// counting on the oscillating market.
int oscillation_oracle(double amplitude, double price_cap);

// CSV rows "step,price_good_1,...,price_good_m,changed".
void write_trace_csv(const AuctionTrace& trace, std::ostream& out);

}  // namespace ce
