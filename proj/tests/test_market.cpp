#include "ce/market.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace ce;
using ce::testing::quasilinear_market;

TEST_CASE("market validation checks ids and curves") {
  Market ok = quasilinear_market({{3, 1}, {2, 2}});
  CHECK(ok.validate().ok);

  Market dup({"b1", "b1"}, {"g1"},
             {UtilitySpec::quasilinear(1), UtilitySpec::quasilinear(2)});
  CHECK_FALSE(dup.validate().ok);

  Market bad({"b1"}, {"g1"}, {UtilitySpec::oscillatory(1.0, false)});
  CHECK_FALSE(bad.validate().ok);
}

TEST_CASE("induced payoffs take the best option against 0") {
  Market m({"b1"}, {"g1", "g2"},
           {UtilitySpec::quasilinear(5), UtilitySpec::quasilinear(3)});
  CHECK(induced_payoffs(m, {0, 0})[0] == doctest::Approx(5));
  CHECK(induced_payoffs(m, {6, 4})[0] == doctest::Approx(0));

  // The oscillating buyer of the non-terminating example at zero prices:
  // best of 11, 11 - c(0), 11 - c'(0).
  Market b4({"b4"}, {"g1", "g2", "g3"},
            {UtilitySpec::quasilinear(11), UtilitySpec::oscillatory(11, false),
             UtilitySpec::oscillatory(11, true)});
  double theta = 11.0 * std::log10(11.0);
  double expected =
      std::max({11.0, 11.0 - std::sin(theta), 11.0 - std::cos(theta)});
  CHECK(induced_payoffs(b4, {0, 0, 0})[0] == doctest::Approx(expected));
}

TEST_CASE("induced prices take the max buyer inverse against 0") {
  Market one({"b1"}, {"g1"}, {UtilitySpec::quasilinear(5)});
  CHECK(induced_prices(one, {2})[0] == doctest::Approx(3));
  CHECK(induced_prices(one, {9})[0] == doctest::Approx(0));  // raw inverse -4

  Market two({"b1", "b2"}, {"g1"},
             {UtilitySpec::quasilinear(5), UtilitySpec::quasilinear(3)});
  CHECK(induced_prices(two, {2, 0})[0] == doctest::Approx(3));
}

TEST_CASE("demand sets of buyer subsets") {
  Market two({"b1", "b2"}, {"g1"},
             {UtilitySpec::quasilinear(5), UtilitySpec::quasilinear(3)});
  CHECK(demand_set_of_buyers(two, {0}, {0, 1}) == std::vector<int>{0});

  Market m = quasilinear_market({{3, 1}, {2, 2}});
  CHECK(demand_set_of_buyers(m, {0, 0}, {1}) == std::vector<int>{0, 1});
  CHECK(demand_set_of_buyers(m, {0, 0}, {0}) == std::vector<int>{0});
  CHECK_THROWS_AS(demand_set_of_buyers(m, {0, 0}, {}), ValidationError);
}

TEST_CASE("demand sets of good subsets") {
  Market two({"b1", "b2"}, {"g1"},
             {UtilitySpec::quasilinear(5), UtilitySpec::quasilinear(3)});
  // Both inverses hit 3 at payoffs (2, 0).
  CHECK(demand_set_of_goods(two, {2, 0}, {0}) == std::vector<int>{0, 1});
  // At payoffs (1, 0) buyer 1's inverse is 4 and sets the price alone.
  CHECK(demand_set_of_goods(two, {1, 0}, {0}) == std::vector<int>{0});
  CHECK_THROWS_AS(demand_set_of_goods(two, {1, 0}, {}), ValidationError);
}

TEST_CASE("verify_equilibrium passes good equilibria and reports bad ones") {
  Market one({"b1"}, {"g1"}, {UtilitySpec::quasilinear(5)});
  Matching matched(1);
  matched.buyer_to_good[0] = 0;
  Equilibrium good{&one, {0}, {5}, matched};
  CHECK(verify_equilibrium(good).pass);

  Equilibrium bad{&one, {1}, {0}, Matching(1)};
  VerifyReport rep = verify_equilibrium(bad);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.violations.size() >= 1);
  bool found = false;
  for (const auto& v : rep.violations)
    found =
        found || (v.condition == Condition::UnmatchedGoodPrice && v.good == 0);
  CHECK(found);

  // Two buyers, one good, priced at the loser's value: all four conditions
  // hold (by hand: 2 = 5-3; no envy: 0 >= 3-3; loser unmatched at 0).
  Market two({"b1", "b2"}, {"g1"},
             {UtilitySpec::quasilinear(5), UtilitySpec::quasilinear(3)});
  Matching mu(2);
  mu.buyer_to_good[0] = 0;
  Equilibrium eq{&two, {3}, {2, 0}, mu};
  CHECK(verify_equilibrium(eq).pass);

  // Buyer 1 envies when the good goes to buyer 2 at that price.
  Matching mu2(2);
  mu2.buyer_to_good[1] = 0;
  Equilibrium envy{&two, {3}, {0, 0}, mu2};
  VerifyReport rep2 = verify_equilibrium(envy);
  CHECK_FALSE(rep2.pass);
  CHECK(rep2.violations.front().condition == Condition::NoEnvy);
}

TEST_CASE("verify verdict is invariant under index permutation") {
  Market m = quasilinear_market({{3, 1}, {2, 2}});
  Matching mu(2);
  mu.buyer_to_good[0] = 0;
  mu.buyer_to_good[1] = 1;
  Equilibrium eq{&m, {0, 0}, {3, 2}, mu};
  CHECK(verify_equilibrium(eq).pass);

  // Same market with both index orders reversed: new b1 = old b2 keeps old
  // g2, which is new g1.
  Market p = quasilinear_market({{2, 2}, {1, 3}});
  Matching pmu(2);
  pmu.buyer_to_good[0] = 0;
  pmu.buyer_to_good[1] = 1;
  Equilibrium peq{&p, {0, 0}, {2, 3}, pmu};
  CHECK(verify_equilibrium(peq).pass);
}

TEST_CASE("tight graph holds the indifference edges and matching flags") {
  Market two({"b1", "b2"}, {"g1"},
             {UtilitySpec::quasilinear(5), UtilitySpec::quasilinear(3)});
  Matching mu(2);
  mu.buyer_to_good[0] = 0;
  Equilibrium eq{&two, {3}, {2, 0}, mu};
  TightGraph tg = tight_graph(eq);
  CHECK(tg.tight(0, 0));
  CHECK(tg.tight(1, 0));
  CHECK(tg.is_matching_edge(0, 0));
  CHECK_FALSE(tg.is_matching_edge(1, 0));

  Market one({"b1"}, {"g1"}, {UtilitySpec::quasilinear(5)});
  Matching m1(1);
  m1.buyer_to_good[0] = 0;
  Equilibrium eq1{&one, {0}, {5}, m1};
  TightGraph tg1 = tight_graph(eq1);
  CHECK(tg1.tight(0, 0));
  CHECK(tg1.is_matching_edge(0, 0));

  Market m22 = quasilinear_market({{3, 1}, {2, 2}});
  Matching mu22(2);
  mu22.buyer_to_good[0] = 0;
  mu22.buyer_to_good[1] = 1;
  Equilibrium eq22{&m22, {0, 0}, {3, 2}, mu22};
  TightGraph tg22 = tight_graph(eq22);
  CHECK(tg22.tight(0, 0));
  CHECK_FALSE(tg22.tight(0, 1));
  CHECK(tg22.tight(1, 0));
  CHECK(tg22.tight(1, 1));
}

TEST_CASE("induced maps are antitone") {
  std::mt19937 rng(23);
  for (int t = 0; t < 40; ++t) {
    Market m = ce::testing::random_market(rng, 3, 3, false);
    std::uniform_real_distribution<double> d(0.0, 3.0);
    PriceVector p{d(rng), d(rng), d(rng)};
    PriceVector higher = p;
    higher[t % 3] += d(rng);
    PayoffVector u1 = induced_payoffs(m, p);
    PayoffVector u2 = induced_payoffs(m, higher);
    for (int i = 0; i < 3; ++i) CHECK(u2[i] <= u1[i] + 1e-12);

    PayoffVector u{d(rng), d(rng), d(rng)};
    PayoffVector more = u;
    more[t % 3] += d(rng);
    PriceVector p1 = induced_prices(m, u);
    PriceVector p2 = induced_prices(m, more);
    for (int j = 0; j < 3; ++j) CHECK(p2[j] <= p1[j] + 1e-9);
  }
}

TEST_CASE("matchings reject double-assigned goods") {
  Matching mu(2);
  mu.buyer_to_good = {0, 0};
  CHECK_THROWS_AS(mu.good_to_buyer(1), ValidationError);
}
