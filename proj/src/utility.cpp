#include "ce/utility.hpp"

#include <algorithm>
#include <cmath>

namespace ce {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Linear interpolation through sorted breakpoints with end-slope extensions.
// Works for both decreasing (utility curves) and increasing (price maps)
// point sets; callers guarantee at least two points.
double interp(const std::vector<std::pair<double, double>>& pts, double x) {
  const size_t k = pts.size();
  if (x <= pts.front().first) {
    double s = (pts[1].second - pts[0].second) / (pts[1].first - pts[0].first);
    return pts[0].second + s * (x - pts[0].first);
  }
  if (x >= pts.back().first) {
    double s = (pts[k - 1].second - pts[k - 2].second) /
               (pts[k - 1].first - pts[k - 2].first);
    return pts[k - 1].second + s * (x - pts[k - 1].first);
  }
  size_t hi = 1;
  while (pts[hi].first < x) ++hi;
  const auto& a = pts[hi - 1];
  const auto& b = pts[hi];
  double w = (x - a.first) / (b.first - a.first);
  return a.second + w * (b.second - a.second);
}

// Inverse of interp in the second coordinate; `increasing` tells which way
// the second coordinate runs.
double interp_inverse(const std::vector<std::pair<double, double>>& pts,
                      double y, bool increasing) {
  const size_t k = pts.size();
  auto seg = [&](size_t a, size_t b) {
    double s = (pts[b].second - pts[a].second) / (pts[b].first - pts[a].first);
    return pts[a].first + (y - pts[a].second) / s;
  };
  if (increasing ? (y <= pts.front().second) : (y >= pts.front().second))
    return seg(0, 1);
  if (increasing ? (y >= pts.back().second) : (y <= pts.back().second))
    return seg(k - 2, k - 1);
  size_t hi = 1;
  while (increasing ? (pts[hi].second < y) : (pts[hi].second > y)) ++hi;
  return seg(hi - 1, hi);
}

double osc_raw(double amplitude, bool cos_variant, double x) {
  const double v = amplitude;
  const double theta = v * std::log10(v - x);
  const double w = cos_variant ? std::cos(theta) : std::sin(theta);
  return v - x - (v - x) / v * w;
}

}  // namespace

PriceMap PriceMap::identity() { return PriceMap{}; }

PriceMap PriceMap::scale(double divisor) {
  PriceMap m;
  m.kind_ = Kind::Scale;
  m.divisor_ = divisor;
  return m;
}

PriceMap PriceMap::piecewise_linear(std::vector<Point> points) {
  PriceMap m;
  m.kind_ = Kind::PiecewiseLinear;
  m.points_ = std::move(points);
  return m;
}

double PriceMap::operator()(double x) const {
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Scale: return x / divisor_;
    case Kind::PiecewiseLinear: return interp(points_, x);
  }
  return x;
}

double PriceMap::inverse(double y) const {
  switch (kind_) {
    case Kind::Identity: return y;
    case Kind::Scale: return y * divisor_;
    case Kind::PiecewiseLinear: return interp_inverse(points_, y, true);
  }
  return y;
}

ValidationResult PriceMap::validate() const {
  switch (kind_) {
    case Kind::Identity: return {};
    case Kind::Scale:
      if (!finite(divisor_) || divisor_ <= 0.0)
        return {false, "price map scale divisor must be positive"};
      return {};
    case Kind::PiecewiseLinear: {
      if (points_.size() < 2)
        return {false, "piecewise linear price map needs at least 2 points"};
      for (size_t t = 0; t < points_.size(); ++t) {
        if (!finite(points_[t].first) || !finite(points_[t].second))
          return {false, "price map breakpoint is not finite"};
        if (t > 0 && points_[t].first <= points_[t - 1].first)
          return {false, "price map breakpoints must have increasing inputs"};
        if (t > 0 && points_[t].second <= points_[t - 1].second)
          return {false, "price map must be strictly increasing"};
      }
      if ((*this)(0.0) < 0.0)
        return {false, "price map must be nonnegative at price 0"};
      return {};
    }
  }
  return {};
}

UtilitySpec UtilitySpec::quasilinear(double value) {
  return UtilitySpec(Quasilinear{value});
}

UtilitySpec UtilitySpec::piecewise_linear(std::vector<Point> points) {
  return UtilitySpec(PiecewiseLinear{std::move(points)});
}

UtilitySpec UtilitySpec::budgeted(double value, double budget,
                                  double steep_slope) {
  return UtilitySpec(Budgeted{value, budget, steep_slope});
}

UtilitySpec UtilitySpec::oscillatory(double amplitude, bool cos_variant) {
  return UtilitySpec(Oscillatory{amplitude, cos_variant});
}

UtilitySpec UtilitySpec::shifted(UtilitySpec inner, double price_shift,
                                 double payoff_shift) {
  return UtilitySpec(Shifted{
      std::make_shared<const UtilitySpec>(std::move(inner)), price_shift,
      payoff_shift});
}

UtilitySpec UtilitySpec::price_mapped(UtilitySpec inner, PriceMap map) {
  return UtilitySpec(PriceMapped{
      std::make_shared<const UtilitySpec>(std::move(inner)), std::move(map)});
}

double UtilitySpec::domain_max() const {
  return std::visit(
      [](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Oscillatory>) {
          return n.amplitude - kOscDomainGuard;
        } else if constexpr (std::is_same_v<T, Shifted>) {
          return n.inner->domain_max() - n.price_shift;
        } else if constexpr (std::is_same_v<T, PriceMapped>) {
          double d = n.inner->domain_max();
          if (!std::isfinite(d)) return d;
          return n.map.inverse(d);
        } else {
          return std::numeric_limits<double>::infinity();
        }
      },
      node_);
}

double UtilitySpec::evaluate(double price) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Quasilinear>) {
          return n.value - price;
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          return interp(n.points, price);
        } else if constexpr (std::is_same_v<T, Budgeted>) {
          if (price <= n.budget) return n.value - price;
          return n.value - n.budget - n.steep_slope * (price - n.budget);
        } else if constexpr (std::is_same_v<T, Oscillatory>) {
          if (price > n.amplitude - kOscDomainGuard)
            throw DomainError("price beyond oscillatory curve domain");
          return osc_raw(n.amplitude, n.cos_variant, price);
        } else if constexpr (std::is_same_v<T, Shifted>) {
          return n.inner->evaluate(price + n.price_shift) - n.payoff_shift;
        } else {
          return n.inner->evaluate(n.map(price));
        }
      },
      node_);
}

double UtilitySpec::evaluate_extended(double price) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Oscillatory>) {
          const double guard = n.amplitude - kOscDomainGuard;
          if (price <= guard) return osc_raw(n.amplitude, n.cos_variant, price);
          return osc_raw(n.amplitude, n.cos_variant, guard) - (price - guard);
        } else if constexpr (std::is_same_v<T, Shifted>) {
          return n.inner->evaluate_extended(price + n.price_shift) -
                 n.payoff_shift;
        } else if constexpr (std::is_same_v<T, PriceMapped>) {
          return n.inner->evaluate_extended(n.map(price));
        } else {
          return evaluate(price);
        }
      },
      node_);
}

double UtilitySpec::invert(double target_payoff) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Quasilinear>) {
          return n.value - target_payoff;
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          return interp_inverse(n.points, target_payoff, false);
        } else if constexpr (std::is_same_v<T, Budgeted>) {
          if (target_payoff >= n.value - n.budget)
            return n.value - target_payoff;
          return n.budget + (n.value - n.budget - target_payoff) / n.steep_slope;
        } else if constexpr (std::is_same_v<T, Shifted>) {
          return n.inner->invert(target_payoff + n.payoff_shift) -
                 n.price_shift;
        } else if constexpr (std::is_same_v<T, PriceMapped>) {
          return n.map.inverse(n.inner->invert(target_payoff));
        } else {
          // Bracketed bisection on the extended (total, strictly decreasing)
          // curve. The bracket starts at [-1, amplitude] and doubles outward.
          double lo = -1.0, hi = n.amplitude;
          int expansions = 0;
          while (evaluate_extended(lo) < target_payoff) {
            lo = lo * 2.0 - 1.0;
            if (++expansions > 60)
              throw InversionFailure("bisection bracket expansion cap hit");
          }
          while (evaluate_extended(hi) > target_payoff) {
            hi = hi * 2.0 + 1.0;
            if (++expansions > 60)
              throw InversionFailure("bisection bracket expansion cap hit");
          }
          for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            double mid = 0.5 * (lo + hi);
            if (evaluate_extended(mid) > target_payoff)
              lo = mid;
            else
              hi = mid;
          }
          return 0.5 * (lo + hi);
        }
      },
      node_);
}

bool UtilitySpec::is_quasilinear() const {
  return std::holds_alternative<Quasilinear>(node_);
}

double UtilitySpec::quasilinear_value() const {
  return std::get<Quasilinear>(node_).value;
}

ValidationResult UtilitySpec::validate() const {
  return std::visit(
      [&](const auto& n) -> ValidationResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Quasilinear>) {
          if (!finite(n.value)) return {false, "quasilinear value not finite"};
          return {};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          if (n.points.size() < 2)
            return {false, "piecewise linear curve needs at least 2 points"};
          for (size_t t = 0; t < n.points.size(); ++t) {
            if (!finite(n.points[t].first) || !finite(n.points[t].second))
              return {false, "piecewise linear breakpoint not finite"};
            if (t > 0 && n.points[t].first <= n.points[t - 1].first)
              return {false, "piecewise linear prices must increase"};
            if (t > 0 && n.points[t].second >= n.points[t - 1].second)
              return {false, "piecewise linear curve must strictly decrease"};
          }
          return {};
        } else if constexpr (std::is_same_v<T, Budgeted>) {
          if (!finite(n.value) || !finite(n.budget) || !finite(n.steep_slope))
            return {false, "budgeted parameters not finite"};
          if (n.budget < 0.0) return {false, "budget must be nonnegative"};
          if (n.steep_slope <= 0.0)
            return {false, "steep slope must be positive"};
          return {};
        } else if constexpr (std::is_same_v<T, Oscillatory>) {
          if (!finite(n.amplitude))
            return {false, "oscillatory amplitude not finite"};
          // Slope of x + ((V-x)/V) sin(V log10(V-x)) is bounded below by
          // 1 - sqrt(1/V^2 + 1/ln^2(10)), positive exactly when the
          // amplitude is large enough; V >= 2 is the contract.
          if (n.amplitude < 2.0)
            return {false,
                    "oscillatory amplitude below monotonicity bound (V >= 2)"};
          return {};
        } else if constexpr (std::is_same_v<T, Shifted>) {
          if (!finite(n.price_shift) || !finite(n.payoff_shift))
            return {false, "shift not finite"};
          if (n.price_shift < 0.0 || n.payoff_shift < 0.0)
            return {false, "shifts must be nonnegative"};
          return n.inner->validate();
        } else {
          ValidationResult m = n.map.validate();
          if (!m.ok) return m;
          return n.inner->validate();
        }
      },
      node_);
}

UtilitySpec shift_for_bounds(const UtilitySpec& spec, double price_bound,
                             double payoff_bound) {
  return UtilitySpec::shifted(spec, price_bound, payoff_bound);
}

UtilitySpec apply_price_map(const UtilitySpec& spec, const PriceMap& map) {
  return UtilitySpec::price_mapped(spec, map);
}

}  // namespace ce
