#include "ce/verification.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace ce {

namespace {

// Next k-combination of indices 0..m-1 in lexicographic order.
bool next_combination(std::vector<int>& c, int m) {
  int k = static_cast<int>(c.size());
  for (int t = k - 1; t >= 0; --t) {
    if (c[t] < m - (k - t)) {
      ++c[t];
      for (int s = t + 1; s < k; ++s) c[s] = c[s - 1] + 1;
      return true;
    }
  }
  return false;
}

int sign_at(double x, double tol) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

}  // namespace

TightnessReport tightness_check(const Equilibrium& eq, Side side,
                                int max_subset_items) {
  const Market& m = *eq.market;
  const int n = m.num_buyers();
  const int g = m.num_goods();
  TightnessReport rep;

  if (side == Side::Lowest) {
    std::vector<int> pos;  // goods with positive prices
    for (int j = 0; j < g; ++j)
      if (eq.prices[j] > kEpsEq) pos.push_back(j);
    if (static_cast<int>(pos.size()) > max_subset_items)
      throw SizeLimit("too many positive-price goods for subset enumeration");
    // interested[i] = bitmask over pos of goods whose induced price buyer i
    // supports at her payoff.
    std::vector<uint64_t> interested(n, 0);
    for (size_t t = 0; t < pos.size(); ++t) {
      for (int i = 0; i < n; ++i) {
        double r = m.at(i, pos[t]).invert(eq.payoffs[i]);
        if (std::abs(r - eq.prices[pos[t]]) <= kEpsEq)
          interested[i] |= uint64_t{1} << t;
      }
    }
    const int p = static_cast<int>(pos.size());
    for (int k = 1; k <= p; ++k) {
      std::vector<int> comb(k);
      for (int t = 0; t < k; ++t) comb[t] = t;
      do {
        uint64_t mask = 0;
        for (int t : comb) mask |= uint64_t{1} << t;
        int demanders = 0;
        for (int i = 0; i < n; ++i)
          if (interested[i] & mask) ++demanders;
        if (demanders < k + 1) {
          rep.pass = false;
          for (int t : comb) rep.witness.push_back(pos[t]);
          return rep;
        }
      } while (next_combination(comb, p));
    }
    return rep;
  }

  std::vector<int> pos;  // buyers with positive payoffs
  for (int i = 0; i < n; ++i)
    if (eq.payoffs[i] > kEpsEq) pos.push_back(i);
  if (static_cast<int>(pos.size()) > max_subset_items)
    throw SizeLimit("too many positive-payoff buyers for subset enumeration");
  if (g > 64) throw SizeLimit("demand masks limited to 64 goods");
  std::vector<uint64_t> demand(pos.size(), 0);
  for (size_t t = 0; t < pos.size(); ++t) {
    int i = pos[t];
    for (int j = 0; j < g; ++j) {
      double v = m.at(i, j).evaluate_extended(eq.prices[j]);
      if (std::abs(v - eq.payoffs[i]) <= kEpsEq)
        demand[t] |= uint64_t{1} << j;
    }
  }
  const int p = static_cast<int>(pos.size());
  for (int k = 1; k <= p; ++k) {
    std::vector<int> comb(k);
    for (int t = 0; t < k; ++t) comb[t] = t;
    do {
      uint64_t goods_mask = 0;
      for (int t : comb) goods_mask |= demand[t];
      if (std::popcount(goods_mask) < k + 1) {
        rep.pass = false;
        for (int t : comb) rep.witness.push_back(pos[t]);
        return rep;
      }
    } while (next_combination(comb, p));
  }
  return rep;
}

StructureReport structure_checks(const std::vector<Equilibrium>& eqs) {
  if (eqs.size() < 2)
    throw ValidationError("structure checks need at least two equilibria");
  const Market* mkt = eqs.front().market;
  for (const Equilibrium& e : eqs)
    if (e.market != mkt)
      throw MarketMismatch("structure checks across different markets");
  const Market& m = *mkt;
  const int n = m.num_buyers();
  const int g = m.num_goods();
  StructureReport rep;
  auto fail = [&](std::string s) {
    rep.pass = false;
    rep.violations.push_back(std::move(s));
  };

  // Entanglement: for a pair matched in one equilibrium, price and payoff
  // move in opposite directions in any other, zero paired with zero.
  for (size_t a = 0; a < eqs.size(); ++a) {
    for (size_t b = 0; b < eqs.size(); ++b) {
      if (a == b) continue;
      for (int i = 0; i < n; ++i) {
        int j = eqs[a].matching.good_of(i);
        if (j < 0) continue;
        int sp = sign_at(eqs[b].prices[j] - eqs[a].prices[j], kEpsEq);
        int su = sign_at(eqs[b].payoffs[i] - eqs[a].payoffs[i], kEpsEq);
        if (sp != -su)
          fail("entanglement violated for buyer " + m.buyers()[i] +
               " and good " + m.goods()[j] + " between equilibria " +
               std::to_string(a) + " and " + std::to_string(b));
      }
    }
  }

  // Conservation: positive payoff (price) anywhere implies matched
  // everywhere.
  for (int i = 0; i < n; ++i) {
    bool positive = std::any_of(eqs.begin(), eqs.end(), [&](const auto& e) {
      return e.payoffs[i] > kEpsEq;
    });
    if (!positive) continue;
    for (size_t a = 0; a < eqs.size(); ++a)
      if (!eqs[a].matching.is_matched(i))
        fail("buyer " + m.buyers()[i] +
             " has a positive payoff somewhere but is unmatched in "
             "equilibrium " +
             std::to_string(a));
  }
  std::vector<std::vector<int>> invs;
  for (const auto& e : eqs) invs.push_back(e.matching.good_to_buyer(g));
  for (int j = 0; j < g; ++j) {
    bool positive = std::any_of(eqs.begin(), eqs.end(), [&](const auto& e) {
      return e.prices[j] > kEpsEq;
    });
    if (!positive) continue;
    for (size_t a = 0; a < eqs.size(); ++a)
      if (invs[a][j] < 0)
        fail("good " + m.goods()[j] +
             " has a positive price somewhere but is unmatched in "
             "equilibrium " +
             std::to_string(a));
  }
  return rep;
}

namespace {

// Exact max-weight assignment on a rectangular nonnegative matrix via the
// potential-based shortest-augmenting-path method on the padded square.
// Only +, -, and comparisons touch the inputs, so integer data stays exact.
struct AssignmentResult {
  double welfare = 0.0;
  std::vector<int> row_to_col;  // -1 for rows matched to padding
};

AssignmentResult max_weight_assignment(
    const std::vector<std::vector<double>>& values) {
  const int n = static_cast<int>(values.size());
  const int m = n == 0 ? 0 : static_cast<int>(values[0].size());
  const int k = std::max(n, m);
  AssignmentResult res;
  res.row_to_col.assign(n, -1);
  if (k == 0) return res;

  double top = 0.0;
  for (const auto& row : values)
    for (double v : row) top = std::max(top, v);
  // Minimize cost = top - value over a perfect matching of the padded
  // square; padding cells carry value 0.
  auto cost = [&](int i, int j) {
    double v = (i < n && j < m) ? values[i][j] : 0.0;
    return top - v;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> pot_row(k + 1, 0.0), pot_col(k + 1, 0.0);
  std::vector<int> col_row(k + 1, 0);  // row matched to column (1-based)
  std::vector<int> way(k + 1, 0);
  for (int i = 1; i <= k; ++i) {
    col_row[0] = i;
    int j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      int i0 = col_row[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - pot_row[i0] - pot_col[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          pot_row[col_row[j]] += delta;
          pot_col[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_row[j0] != 0);
    do {
      int j1 = way[j0];
      col_row[j0] = col_row[j1];
      j0 = j1;
    } while (j0);
  }

  for (int j = 1; j <= k; ++j) {
    int i = col_row[j];
    if (i >= 1 && i <= n && j <= m) {
      res.row_to_col[i - 1] = j - 1;
      res.welfare += values[i - 1][j - 1];
    }
  }
  return res;
}

}  // namespace

VcgOutcome vcg_oracle(const std::vector<std::vector<double>>& values) {
  const int n = static_cast<int>(values.size());
  const int m = n == 0 ? 0 : static_cast<int>(values[0].size());
  if (n > 16 || m > 16) throw SizeLimit("vcg oracle limited to 16x16");
  for (const auto& row : values) {
    if (static_cast<int>(row.size()) != m)
      throw ValidationError("value matrix is ragged");
    for (double v : row)
      if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("values must be finite and nonnegative");
  }

  AssignmentResult full = max_weight_assignment(values);
  VcgOutcome out;
  out.assignment = Matching(n);
  out.assignment.buyer_to_good = full.row_to_col;
  out.welfare = full.welfare;
  out.payments.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    int j = full.row_to_col[i];
    if (j < 0) continue;
    std::vector<std::vector<double>> rest = values;
    rest.erase(rest.begin() + i);
    AssignmentResult without = max_weight_assignment(rest);
    out.payments[i] = without.welfare - (full.welfare - values[i][j]);
  }
  return out;
}

PriceVector brute_force_lowest(const Market& market, double grid_step) {
  const int n = market.num_buyers();
  const int g = market.num_goods();
  if (g > 3) throw SizeLimit("brute-force search limited to 3 goods");
  if (!(grid_step > 0.0)) throw ValidationError("grid step must be positive");
  const double tol = std::max(kEpsEq, grid_step);

  // Prices above every buyer's root can never support a matched good.
  std::vector<int> counts(g);
  double total_points = 1.0;
  for (int j = 0; j < g; ++j) {
    double ub = 0.0;
    for (int i = 0; i < n; ++i)
      ub = std::max(ub, market.at(i, j).invert(0.0));
    counts[j] = static_cast<int>(std::ceil(ub / grid_step)) + 2;
    total_points *= counts[j];
  }
  if (total_points > 2e7) throw SizeLimit("price grid too large");

  // Value tables along each good's 1-D grid.
  std::vector<std::vector<std::vector<double>>> table(
      n, std::vector<std::vector<double>>(g));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < g; ++j) {
      table[i][j].resize(counts[j]);
      for (int k = 0; k < counts[j]; ++k)
        table[i][j][k] = market.at(i, j).evaluate_extended(k * grid_step);
    }

  PriceVector best(g, std::numeric_limits<double>::infinity());
  bool found = false;
  std::vector<int> idx(g, 0);
  PriceVector p(g);
  PayoffVector u(n);
  for (;;) {
    for (int j = 0; j < g; ++j) p[j] = idx[j] * grid_step;
    for (int i = 0; i < n; ++i) {
      double bestv = 0.0;
      for (int j = 0; j < g; ++j) bestv = std::max(bestv, table[i][j][idx[j]]);
      u[i] = bestv;
    }
    // Cheap filter: every positive-price good needs a tight buyer.
    bool plausible = true;
    for (int j = 0; j < g && plausible; ++j) {
      if (p[j] <= tol) continue;
      bool tight = false;
      for (int i = 0; i < n && !tight; ++i)
        tight = std::abs(table[i][j][idx[j]] - u[i]) <= tol;
      plausible = tight;
    }
    if (plausible) {
      try {
        Equilibrium eq{&market, p, u,
                       supporting_matching(market, p, u, tol)};
        if (verify_equilibrium(eq, tol).pass) {
          found = true;
          for (int j = 0; j < g; ++j) best[j] = std::min(best[j], p[j]);
        }
      } catch (const MatchingFailure&) {
      }
    }
    int j = 0;
    while (j < g && ++idx[j] == counts[j]) idx[j++] = 0;
    if (j == g) break;
  }
  if (!found) throw Error("no feasible grid point found");
  return best;
}

ProbeReport strategyproof_probe(const Market& market,
                                const std::vector<int>& coalition,
                                const MisreportGrid& grid,
                                const SolveOptions& opts) {
  const int n = market.num_buyers();
  const int g = market.num_goods();
  if (coalition.empty()) throw ValidationError("empty coalition");
  for (int i : coalition)
    if (i < 0 || i >= n) throw ValidationError("coalition member out of range");
  if (!(grid.step > 0.0 && grid.hi >= grid.lo))
    throw ValidationError("bad misreport grid");

  const int levels = static_cast<int>((grid.hi - grid.lo) / grid.step) + 1;
  const int dims = static_cast<int>(coalition.size()) * g;
  double combos = std::pow(static_cast<double>(levels), dims);
  if (combos > 1e6) throw SizeLimit("misreport grid too large");

  Equilibrium truthful = solve_lowest(market, opts);

  ProbeReport rep;
  std::vector<int> idx(dims, 0);
  std::vector<UtilitySpec> specs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < g; ++j) specs.push_back(market.at(i, j));
  for (;;) {
    std::vector<UtilitySpec> cur = specs;
    for (size_t c = 0; c < coalition.size(); ++c)
      for (int j = 0; j < g; ++j) {
        double v = grid.lo + grid.step * idx[c * g + j];
        cur[static_cast<size_t>(coalition[c]) * g + j] =
            UtilitySpec::quasilinear(v);
      }
    Market reported(market.buyers(), market.goods(), std::move(cur));
    Equilibrium eq = solve_lowest(reported, opts);
    ++rep.misreports_tested;

    bool all_gain = true;
    for (int i : coalition) {
      int j = eq.matching.good_of(i);
      double realized =
          j < 0 ? 0.0 : market.at(i, j).evaluate_extended(eq.prices[j]);
      if (realized <= truthful.payoffs[i] + kEpsEq) {
        all_gain = false;
        break;
      }
    }
    if (all_gain) {
      rep.pass = false;
      for (int t = 0; t < dims; ++t)
        rep.violating_values.push_back(grid.lo + grid.step * idx[t]);
      return rep;
    }

    int t = 0;
    while (t < dims && ++idx[t] == levels) idx[t++] = 0;
    if (t == dims) break;
  }
  return rep;
}

}  // namespace ce
