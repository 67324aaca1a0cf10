#pragma once

#include <random>
#include <string>
#include <vector>

#include "ce/market.hpp"

namespace ce::testing {

// Deterministic generators shared by the unit and acceptance suites.

inline UtilitySpec random_spec(std::mt19937& rng) {
  std::uniform_int_distribution<int> value(0, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> family(0, 6);
  switch (family(rng)) {
    case 0:
    case 1:
      return UtilitySpec::quasilinear(value(rng));
    case 2: {
      // Decreasing polyline with slopes in [-3, -0.4]; gentle enough that
      // inversion noise stays far below the equality tolerance.
      double v = value(rng) + 1.0;
      double p1 = 1.0 + 4.0 * unit(rng);
      double s1 = 0.4 + 2.6 * unit(rng);
      double s2 = 0.4 + 2.6 * unit(rng);
      return UtilitySpec::piecewise_linear(
          {{0.0, v}, {p1, v - s1 * p1}, {p1 + 3.0, v - s1 * p1 - 3.0 * s2}});
    }
    case 3: {
      double v = value(rng) + 1.0;
      double b = 0.5 + unit(rng) * v;
      return UtilitySpec::budgeted(v, b);
    }
    case 4:
      return UtilitySpec::oscillatory(2.0 + 10.0 * unit(rng), rng() & 1);
    case 5:
      return UtilitySpec::shifted(UtilitySpec::quasilinear(value(rng) + 2),
                                  unit(rng), unit(rng));
    default:
      return apply_price_map(UtilitySpec::quasilinear(value(rng) + 1),
                             PriceMap::scale(0.5 + unit(rng)));
  }
}

inline Market random_market(std::mt19937& rng, int num_buyers, int num_goods,
                            bool quasilinear_only) {
  std::vector<std::string> buyers, goods;
  for (int i = 0; i < num_buyers; ++i) buyers.push_back("b" + std::to_string(i + 1));
  for (int j = 0; j < num_goods; ++j) goods.push_back("g" + std::to_string(j + 1));
  std::uniform_int_distribution<int> value(0, 10);
  std::vector<UtilitySpec> u;
  for (int i = 0; i < num_buyers * num_goods; ++i)
    u.push_back(quasilinear_only ? UtilitySpec::quasilinear(value(rng))
                                 : random_spec(rng));
  return Market(std::move(buyers), std::move(goods), std::move(u));
}

inline Market quasilinear_market(const std::vector<std::vector<double>>& values) {
  const int n = static_cast<int>(values.size());
  const int m = n == 0 ? 0 : static_cast<int>(values[0].size());
  std::vector<std::string> buyers, goods;
  for (int i = 0; i < n; ++i) buyers.push_back("b" + std::to_string(i + 1));
  for (int j = 0; j < m; ++j) goods.push_back("g" + std::to_string(j + 1));
  std::vector<UtilitySpec> u;
  for (const auto& row : values)
    for (double v : row) u.push_back(UtilitySpec::quasilinear(v));
  return Market(std::move(buyers), std::move(goods), std::move(u));
}

}  // namespace ce::testing
