#pragma once

#include <string>
#include <vector>

#include "ce/market.hpp"
#include "ce/solver.hpp"

namespace ce {

enum class Side { Lowest, Highest };

struct TightnessReport {
  bool pass = true;
  // First violating subset: good indices for the lowest side, buyer indices
  // for the highest side. Subsets are scanned by increasing cardinality,
  // then lexicographically.
  std::vector<int> witness;
};

// Extremality certificate: an equilibrium is lowest iff every subset T of
// positive-price goods has at least |T|+1 interested buyers; highest iff
// every subset S of positive-payoff buyers demands at least |S|+1 goods.
TightnessReport tightness_check(const Equilibrium& eq, Side side,
                                int max_subset_items = 20);

struct StructureReport {
  bool pass = true;
  std::vector<std::string> violations;
};

// Cross-equilibrium laws for a family of equilibria of one market: matched
// pairs are entangled (a good's price moves against its buyer's payoff, zero
// with zero), and an agent with a positive payoff/price anywhere is matched
// everywhere.
StructureReport structure_checks(const std::vector<Equilibrium>& eqs);

struct VcgOutcome {
  Matching assignment;
  std::vector<double> payments;  // per buyer; 0 for losers
  double welfare = 0.0;
};

// Maximum-weight bipartite matching (shortest-augmenting-path method with
// potentials; exact on integer inputs) plus payments as welfare
// externalities: payment_i = welfare(without i) - (welfare - v_i,mu(i)).
VcgOutcome vcg_oracle(const std::vector<std::vector<double>>& values);

// Independent oracle for lowest-equilibrium prices: scans the price grid,
// keeps points that verify as an equilibrium at tolerance
// max(kEpsEq, grid_step), and returns the componentwise minimum.
PriceVector brute_force_lowest(const Market& market, double grid_step);

struct MisreportGrid {
  double step = 0.5;
  double lo = 0.0;
  double hi = 10.0;
};

struct ProbeReport {
  bool pass = true;
  long long misreports_tested = 0;
  // First profitable joint misreport, flattened (member-major, then good),
  // when pass is false.
  std::vector<double> violating_values;
};

// Falsification probe for group strategyproofness of the lowest-equilibrium
// mechanism: exhaustively replaces the coalition's curves with quasilinear
// grid misreports and checks that no joint misreport strictly raises every
// member's true payoff.
ProbeReport strategyproof_probe(const Market& market,
                                const std::vector<int>& coalition,
                                const MisreportGrid& grid,
                                const SolveOptions& opts = {});

}  // namespace ce
