// Acceptance suite: one check per criterion, each printed as a pass/fail
// line. Exits with the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "ce/auction.hpp"
#include "ce/lattice.hpp"
#include "ce/mechanisms.hpp"
#include "ce/solver.hpp"
#include "ce/verification.hpp"
#include "test_support.hpp"

using namespace ce;
using ce::testing::quasilinear_market;
using ce::testing::random_market;

namespace {

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int num, const char* name, bool pass, const std::string& details) {
  std::printf("criterion %d [%s]: %s%s%s\n", num, name, pass ? "PASS" : "FAIL",
              details.empty() ? "" : " -- ", details.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename Fn>
void run(int num, const char* name, Fn fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(num, name, false, std::string("exception: ") + e.what());
  }
}

bool close(double a, double b, double tol = 1e-6) {
  return std::abs(a - b) <= tol;
}

std::string timing(const Timer& t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.1fs", t.seconds());
  return buf;
}

// Shared across criteria 2/3/4/8.
struct SolvedFamily {
  Market market;
  std::vector<Equilibrium> family;  // lowest, highest, t=0.25, 0.5, 0.75
};

void criterion1_vcg_equivalence() {
  Timer timer;
  std::mt19937 rng(101);
  std::uniform_int_distribution<int> value(0, 10);
  int checked = 0;
  bool ok = true;
  std::string detail;
  for (int t = 0; t < 200 && ok; ++t) {
    int n = 1 + static_cast<int>(rng() % 5);
    int g = 1 + static_cast<int>(rng() % 5);
    std::vector<std::vector<double>> values(n, std::vector<double>(g));
    for (auto& row : values)
      for (double& v : row) v = value(rng);
    Market m = quasilinear_market(values);
    Equilibrium lo = solve_lowest(m);
    VcgOutcome vcg = vcg_oracle(values);
    std::vector<double> expected(g, 0.0);
    for (int i = 0; i < n; ++i)
      if (vcg.assignment.good_of(i) >= 0)
        expected[vcg.assignment.good_of(i)] = vcg.payments[i];
    for (int j = 0; j < g; ++j) {
      if (!close(lo.prices[j], expected[j])) {
        ok = false;
        detail = "price/payment mismatch on market " + std::to_string(t);
      }
    }
    ++checked;
  }
  bool in_time = timer.seconds() < 30.0;
  report(1, "lowest prices equal the payment oracle", ok && in_time,
         std::to_string(checked) + " quasilinear markets, " + timing(timer));
}

void criterion2_cross_consistency(std::vector<SolvedFamily>& bank) {
  Timer timer;
  std::mt19937 rng(103);
  bool ok = true;
  std::string detail;
  int checked = 0;
  for (int t = 0; t < 100 && ok; ++t) {
    int n = 1 + static_cast<int>(rng() % 4);
    int g = 1 + static_cast<int>(rng() % (8 - n > 4 ? 4 : 8 - n));
    Market m = random_market(rng, n, g, false);
    Equilibrium lo = solve_lowest(m);
    Equilibrium hi = solve_highest(m);
    for (int i = 0; i < n && ok; ++i) {
      Equilibrium hi_minus = solve_highest(m.remove_buyer(i));
      if (!close(lo.payoffs[i], induced_payoffs(m, hi_minus.prices)[i])) {
        ok = false;
        detail = "identity I failed on market " + std::to_string(t);
      }
      for (int j = 0; j < g; ++j)
        if (lo.prices[j] > hi_minus.prices[j] + 1e-6) {
          ok = false;
          detail = "dominance III failed on market " + std::to_string(t);
        }
      int j = lo.matching.good_of(i);
      if (j >= 0 && !close(lo.prices[j], hi_minus.prices[j])) {
        ok = false;
        detail = "matched-pair equality III failed on market " +
                 std::to_string(t);
      }
    }
    for (int j = 0; j < g && ok; ++j) {
      Equilibrium lo_minus = solve_lowest(m.remove_good(j));
      double induced = 0.0;
      for (int i = 0; i < n; ++i)
        induced = std::max(induced, m.at(i, j).invert(lo_minus.payoffs[i]));
      if (!close(hi.prices[j], induced)) {
        ok = false;
        detail = "identity II failed on market " + std::to_string(t);
      }
      std::vector<int> inv = hi.matching.good_to_buyer(g);
      for (int i = 0; i < n; ++i)
        if (hi.payoffs[i] > lo_minus.payoffs[i] + 1e-6) {
          ok = false;
          detail = "dominance IV failed on market " + std::to_string(t);
        }
      if (inv[j] >= 0 && !close(hi.payoffs[inv[j]], lo_minus.payoffs[inv[j]])) {
        ok = false;
        detail = "matched-pair equality IV failed on market " +
                 std::to_string(t);
      }
    }
    if (t < 50) bank.push_back({std::move(m), {}});
    ++checked;
  }
  bool in_time = timer.seconds() < 120.0;
  report(2, "inductive identities I-IV", ok && in_time,
         std::to_string(checked) + " mixed markets, " + timing(timer) +
             (detail.empty() ? "" : "; " + detail));
}

void criterion3_validity_and_tightness() {
  Timer timer;
  std::mt19937 rng(107);
  int violations = 0;
  int outputs = 0;
  for (int t = 0; t < 60; ++t) {
    int n = 1 + static_cast<int>(rng() % 4);
    int g = 1 + static_cast<int>(rng() % 4);
    Market m = random_market(rng, n, g, t % 3 == 0);
    Equilibrium lo = solve_lowest(m);
    Equilibrium hi = solve_highest(m);
    outputs += 2;
    if (!verify_equilibrium(lo).pass) ++violations;
    if (!verify_equilibrium(hi).pass) ++violations;
    if (!tightness_check(lo, Side::Lowest).pass) ++violations;
    if (!tightness_check(hi, Side::Highest).pass) ++violations;
  }
  report(3, "solver outputs verify and are extremal", violations == 0,
         std::to_string(outputs) + " outputs, " +
             std::to_string(violations) + " violations, " + timing(timer));
}

void criterion4_lattice(std::vector<SolvedFamily>& bank) {
  Timer timer;
  bool ok = true;
  std::string detail;
  int families = 0;
  for (SolvedFamily& entry : bank) {
    if (families == 50) break;
    const Market& m = entry.market;
    const int g = m.num_goods();
    Equilibrium lo = solve_lowest(m);
    Equilibrium hi = solve_highest(m);
    entry.family.push_back(lo);
    entry.family.push_back(hi);
    PriceVector prev = lo.prices;
    for (double tt : {0.25, 0.5, 0.75}) {
      Equilibrium e = interpolate_continuum(m, tt);
      for (int j = 0; j < g; ++j)
        if (e.prices[j] < prev[j] - 1e-6) {
          ok = false;
          detail = "continuum prices not monotone in t";
        }
      prev = e.prices;
      entry.family.push_back(std::move(e));
    }
    for (const Equilibrium& a : entry.family) {
      if (!verify_equilibrium(a).pass) {
        ok = false;
        detail = "family member fails verification";
      }
      for (int j = 0; j < g; ++j)
        if (a.prices[j] < lo.prices[j] - 1e-6 ||
            a.prices[j] > hi.prices[j] + 1e-6) {
          ok = false;
          detail = "equilibrium escapes the [lowest, highest] band";
        }
      for (const Equilibrium& b : entry.family) {
        Equilibrium inf = meet(a, b);
        Equilibrium sup = join(a, b);
        if (!verify_equilibrium(inf).pass || !verify_equilibrium(sup).pass) {
          ok = false;
          detail = "meet/join not closed";
        }
      }
    }
    ++families;
  }
  report(4, "lattice closure and extremality", ok && families == 50,
         std::to_string(families) + " families, " + timing(timer) +
             (detail.empty() ? "" : "; " + detail));
}

void criterion5_oscillating_auction() {
  Timer timer;
  bool ok = true;
  std::string detail;

  Market ex1 = example1_market(11.0);
  AuctionTrace trace = run_auction(ex1, 1e-3, 200000);
  if (trace.terminated) {
    ok = false;
    detail = "oscillating market terminated";
  }
  if (trace.demand_change_count < 12) {
    ok = false;
    detail = "too few demand changes: " +
             std::to_string(trace.demand_change_count);
  }
  double max_price = 0.0;
  for (double p : trace.samples.back().second)
    max_price = std::max(max_price, p);
  int expected = oscillation_oracle(11.0, max_price);
  if (trace.demand_change_count > 2 * expected ||
      2 * trace.demand_change_count < expected) {
    ok = false;
    detail = "count " + std::to_string(trace.demand_change_count) +
             " outside the factor-2 band of oracle " +
             std::to_string(expected);
  }
  if (max_price < 10.99) {
    ok = false;
    detail = "prices did not approach the amplitude";
  }
  for (size_t s = 1; s < trace.samples.size(); ++s)
    for (int j = 0; j < 3; ++j)
      if (trace.samples[s].second[j] < trace.samples[s - 1].second[j] - 1e-12)
        ok = false;
  {
    std::ofstream out("acceptance_example1_trace.csv");
    write_trace_csv(trace, out);
  }
  {
    std::ifstream in("acceptance_example1_trace.csv");
    std::string line;
    long rows = -1;  // header
    while (std::getline(in, line)) ++rows;
    if (rows != static_cast<long>(trace.samples.size())) {
      ok = false;
      detail = "trace csv row count mismatch";
    }
  }
  bool osc_in_time = timer.seconds() < 60.0;

  // Contrast: quasilinear markets terminate at the lowest equilibrium.
  std::mt19937 rng(109);
  int terminated = 0;
  const double step = 0.01;
  for (int t = 0; t < 100; ++t) {
    int n = 1 + static_cast<int>(rng() % 4);
    int g = 1 + static_cast<int>(rng() % 4);
    Market m = random_market(rng, n, g, true);
    AuctionTrace qt = run_auction(m, step, 200000);
    if (!qt.terminated) {
      ok = false;
      detail = "quasilinear auction did not terminate";
      continue;
    }
    ++terminated;
    Equilibrium lo = solve_lowest(m);
    for (int j = 0; j < g; ++j)
      if (std::abs(qt.samples.back().second[j] - lo.prices[j]) >
          step + 1e-6) {
        ok = false;
        detail = "quasilinear auction missed the lowest prices";
      }
  }
  report(5, "oscillating auction never stops, quasilinear ones do",
         ok && osc_in_time,
         std::to_string(trace.demand_change_count) + " changes vs oracle " +
             std::to_string(expected) + ", " + std::to_string(terminated) +
             "/100 terminated, " + timing(timer) +
             (detail.empty() ? "" : "; " + detail));
}

void criterion6_strategyproofness() {
  Timer timer;
  std::mt19937 rng(113);
  std::uniform_int_distribution<int> value(0, 10);
  bool ok = true;
  std::string detail;
  long long tested = 0;
  MisreportGrid grid{0.5, 0.0, 10.0};
  for (int t = 0; t < 20 && ok; ++t) {
    int n = 2 + static_cast<int>(rng() % 3);
    int g = t < 10 ? 1 : 2;
    Market m = random_market(rng, n, g, true);
    for (int a = 0; a < n && ok; ++a) {
      ProbeReport rep = strategyproof_probe(m, {a}, grid);
      tested += rep.misreports_tested;
      if (!rep.pass) {
        ok = false;
        detail = "profitable single misreport on market " + std::to_string(t);
      }
      for (int b = a + 1; b < n && ok; ++b) {
        ProbeReport rep2 = strategyproof_probe(m, {a, b}, grid);
        tested += rep2.misreports_tested;
        if (!rep2.pass) {
          ok = false;
          detail = "profitable coalition misreport on market " +
                   std::to_string(t);
        }
      }
    }
  }
  bool in_time = timer.seconds() < 300.0;
  report(6, "no coalition profits from grid misreports", ok && in_time,
         std::to_string(tested) + " misreports, " + timing(timer) +
             (detail.empty() ? "" : "; " + detail));
}

void criterion7_ad_auction() {
  Timer timer;
  std::mt19937 rng(127);
  std::uniform_real_distribution<double> rate(0.05, 1.0);
  std::uniform_int_distribution<int> value(1, 10);
  bool ok = true;
  std::string detail;
  for (int t = 0; t < 50 && ok; ++t) {
    int n = 1 + static_cast<int>(rng() % 4);
    int g = 1 + static_cast<int>(rng() % 4);
    AdAuctionConfig cfg;
    for (int j = 0; j < g; ++j) cfg.slots.push_back("s" + std::to_string(j));
    for (int i = 0; i < n; ++i) {
      AdvertiserSpec a;
      a.id = "a" + std::to_string(i);
      a.mode = rng() % 3 == 0 ? AdMode::Cpm : AdMode::Cpc;
      std::vector<double> ctrs;
      for (int j = 0; j < g; ++j) {
        double v = value(rng);
        double c = a.mode == AdMode::Cpc ? rate(rng) : 1.0;
        a.slot_curves.push_back(
            a.mode == AdMode::Cpc
                ? UtilitySpec::piecewise_linear({{0.0, c * v}, {v, 0.0}})
                : UtilitySpec::quasilinear(v));
        a.standard.push_back(StandardParams{v, c});
        ctrs.push_back(a.mode == AdMode::Cpc ? c : rate(rng));
      }
      cfg.advertisers.push_back(std::move(a));
      cfg.engine_ctr.push_back(std::move(ctrs));
    }
    AdAuctionOutcome out = run_ad_auction(cfg);
    WelfareReport rep = welfare_report(cfg, out);
    if (!rep.all_standard_agreeing || !rep.vcg) {
      ok = false;
      detail = "instance not recognized as standard/agreeing";
      break;
    }
    double welfare = 0.0;
    for (const auto& row : out.rows) {
      const StandardParams& sp =
          *cfg.advertisers[row.advertiser].standard[row.slot];
      welfare += cfg.advertisers[row.advertiser].mode == AdMode::Cpc
                     ? sp.ctr * sp.value
                     : sp.value;
      // Unit consistency for CPC rows, exact up to the one rounding of
      // the division that defines the per-click price.
      if (cfg.advertisers[row.advertiser].mode == AdMode::Cpc) {
        double back =
            row.observed_price * cfg.engine_ctr[row.advertiser][row.slot];
        double ulps = 4.0 * 2.220446049250313e-16 *
                      std::max(1.0, row.base_price);
        if (std::abs(back - row.base_price) > ulps) {
          ok = false;
          detail = "base price is not rate times per-click price";
        }
      }
    }
    if (!close(welfare, rep.vcg->welfare)) {
      ok = false;
      detail = "assignment welfare differs from the reference";
    }
    std::vector<double> ref(g, 0.0);
    for (int i = 0; i < n; ++i)
      if (rep.vcg->assignment.good_of(i) >= 0)
        ref[rep.vcg->assignment.good_of(i)] = rep.vcg->payments[i];
    for (int j = 0; j < g; ++j)
      if (!close(out.base_prices[j], ref[j])) {
        ok = false;
        detail = "base prices differ from reference payments";
      }
  }

  // The worked instance: (10, 0.2) against (2, 0.5) pays 5 per click.
  AdAuctionConfig worked;
  worked.slots = {"s"};
  for (auto [v, c] : {std::pair{10.0, 0.2}, std::pair{2.0, 0.5}}) {
    AdvertiserSpec a;
    a.id = "a" + std::to_string(worked.advertisers.size());
    a.mode = AdMode::Cpc;
    a.slot_curves.push_back(
        UtilitySpec::piecewise_linear({{0.0, c * v}, {v, 0.0}}));
    a.standard.push_back(StandardParams{v, c});
    worked.advertisers.push_back(std::move(a));
    worked.engine_ctr.push_back({c});
  }
  AdAuctionOutcome out = run_ad_auction(worked);
  if (out.rows.size() != 1 || out.rows[0].advertiser != 0 ||
      !close(out.rows[0].observed_price, 5.0)) {
    ok = false;
    detail = "worked instance did not price at 5 per click";
  }
  report(7, "personalized-price auction matches the reference outcome", ok,
         "50 instances plus the worked one, " + timing(timer) +
             (detail.empty() ? "" : "; " + detail));
}

void criterion8_structure(const std::vector<SolvedFamily>& bank) {
  Timer timer;
  bool ok = true;
  int families = 0;
  for (const SolvedFamily& entry : bank) {
    if (entry.family.empty()) continue;
    if (!structure_checks(entry.family).pass) ok = false;
    ++families;
  }
  report(8, "entanglement and matching conservation", ok && families == 50,
         std::to_string(families) + " families, " + timing(timer));
}

// Curves with slope >= 1 everywhere: the grid oracle's value-space
// tolerance then admits no point more than one grid cell below the true
// lowest prices, which is exactly the band the criterion asserts.
Market random_steep_market(std::mt19937& rng, int n, int g) {
  std::uniform_int_distribution<int> value(0, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> buyers, goods;
  for (int i = 0; i < n; ++i) buyers.push_back("b" + std::to_string(i + 1));
  for (int j = 0; j < g; ++j) goods.push_back("g" + std::to_string(j + 1));
  std::vector<UtilitySpec> u;
  for (int t = 0; t < n * g; ++t) {
    switch (rng() % 4) {
      case 0:
      case 1:
        u.push_back(UtilitySpec::quasilinear(value(rng)));
        break;
      case 2: {
        double v = value(rng) + 1.0;
        u.push_back(UtilitySpec::budgeted(v, 0.5 + unit(rng) * v));
        break;
      }
      default: {
        double v = value(rng) + 1.0;
        double p1 = 0.5 + 2.0 * unit(rng);
        double s1 = 1.0 + 2.0 * unit(rng);
        double s2 = 1.0 + 2.0 * unit(rng);
        u.push_back(UtilitySpec::piecewise_linear(
            {{0.0, v}, {p1, v - s1 * p1}, {p1 + 2.0, v - s1 * p1 - 2.0 * s2}}));
      }
    }
  }
  return Market(std::move(buyers), std::move(goods), std::move(u));
}

void criterion9_oracle_extremality() {
  Timer timer;
  std::mt19937 rng(131);
  bool ok = true;
  std::string detail;
  const double grid_step = 0.01;
  for (int t = 0; t < 30 && ok; ++t) {
    int n = 1 + static_cast<int>(rng() % 4);
    int g = 1 + static_cast<int>(rng() % 2);
    Market m = random_steep_market(rng, n, g);
    Equilibrium lo = solve_lowest(m);
    PriceVector bf = brute_force_lowest(m, grid_step);
    for (int j = 0; j < g; ++j)
      if (lo.prices[j] > bf[j] + grid_step) {
        ok = false;
        detail = "solver prices exceed the grid oracle on market " +
                 std::to_string(t);
      }
  }
  report(9, "solver prices never exceed the grid oracle", ok,
         "30 markets, grid 0.01, " + timing(timer) +
             (detail.empty() ? "" : "; " + detail));
}

}  // namespace

int main() {
  std::vector<SolvedFamily> bank;
  run(1, "lowest prices equal the payment oracle", criterion1_vcg_equivalence);
  run(2, "inductive identities I-IV",
      [&] { criterion2_cross_consistency(bank); });
  run(3, "solver outputs verify and are extremal",
      criterion3_validity_and_tightness);
  run(4, "lattice closure and extremality", [&] { criterion4_lattice(bank); });
  run(5, "oscillating auction never stops, quasilinear ones do",
      criterion5_oscillating_auction);
  run(6, "no coalition profits from grid misreports",
      criterion6_strategyproofness);
  run(7, "personalized-price auction matches the reference outcome",
      criterion7_ad_auction);
  run(8, "entanglement and matching conservation",
      [&] { criterion8_structure(bank); });
  run(9, "solver prices never exceed the grid oracle",
      criterion9_oracle_extremality);
  return failures;
}
