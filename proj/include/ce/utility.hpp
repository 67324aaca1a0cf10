#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ce/errors.hpp"

namespace ce {

// Tolerance for equality/tightness comparisons on prices and payoffs.
inline constexpr double kEpsEq = 1e-6;
// Tolerance for numeric inversion of utility curves.
inline constexpr double kEpsInv = 1e-9;
// Oscillatory curves are evaluated up to amplitude - kOscDomainGuard; the
// log has a singularity at the amplitude itself.
inline constexpr double kOscDomainGuard = 1e-6;

struct ValidationResult {
  bool ok = true;
  std::string reason;
};

// Continuous strictly increasing transform applied to a good's base price.
// Used for personalized (discriminated) prices and for folding seller-side
// curves into the buyer/good model.
class PriceMap {
 public:
  using Point = std::pair<double, double>;  // (base price, observed price)

  static PriceMap identity();
  // g(x) = x / divisor, divisor > 0.
  static PriceMap scale(double divisor);
  // Piecewise linear through the given points (strictly increasing in both
  // coordinates), extended linearly beyond the ends with the end slopes.
  static PriceMap piecewise_linear(std::vector<Point> points);

  double operator()(double x) const;
  double inverse(double y) const;
  ValidationResult validate() const;

  bool is_identity() const { return kind_ == Kind::Identity; }
  bool is_scale() const { return kind_ == Kind::Scale; }
  double scale_divisor() const { return divisor_; }
  const std::vector<Point>& points() const { return points_; }

  bool operator==(const PriceMap&) const = default;

 private:
  enum class Kind { Identity, Scale, PiecewiseLinear };
  Kind kind_ = Kind::Identity;
  double divisor_ = 1.0;
  std::vector<Point> points_;
};

// One buyer-good utility curve: utility as a function of the price paid.
// Curves are continuous, strictly decreasing, and eventually nonpositive, so
// they are invertible on all of R (oscillatory curves get a linear
// continuation past their domain guard, see evaluate_extended).
class UtilitySpec {
 public:
  using Point = std::pair<double, double>;  // (price, utility)

  // u(x) = value - x.
  static UtilitySpec quasilinear(double value);
  // Piecewise linear through points sorted by price with strictly decreasing
  // utilities; extended linearly beyond the ends with the end slopes.
  static UtilitySpec piecewise_linear(std::vector<Point> points);
  // Quasilinear up to the budget, then slope -steep_slope. A smooth stand-in
  // for a hard budget that keeps the curve continuous and invertible.
  static UtilitySpec budgeted(double value, double budget,
                              double steep_slope = 1e9);
  // u(x) = V - x - ((V - x)/V) * sin(V*log10(V - x)), or the cos variant.
  // Strictly decreasing for V >= 2; defined for x < V.
  static UtilitySpec oscillatory(double amplitude, bool cos_variant);
  // u'(x) = inner(x + price_shift) - payoff_shift.
  static UtilitySpec shifted(UtilitySpec inner, double price_shift,
                             double payoff_shift);
  // u'(x) = inner(g(x)).
  static UtilitySpec price_mapped(UtilitySpec inner, PriceMap map);

  // Utility at the given price. Throws DomainError past an oscillatory
  // curve's domain guard.
  double evaluate(double price) const;

  // Total on R: past the domain guard the curve continues linearly with
  // slope -1 from the guard point, staying strictly decreasing. This is the
  // extension the equilibrium computations use.
  double evaluate_extended(double price) const;

  // Price at which the curve attains target_payoff (the raw inverse; may be
  // negative). Closed form for the linear families, bracketed bisection on
  // evaluate_extended otherwise.
  double invert(double target_payoff) const;

  // Largest admissible price for evaluate(); +inf except for oscillatory
  // curves (and wrappers around them).
  double domain_max() const;

  ValidationResult validate() const;

  bool is_quasilinear() const;
  double quasilinear_value() const;  // valid only when is_quasilinear()

  // Variant access for serialization.
  struct Quasilinear { double value; };
  struct PiecewiseLinear { std::vector<Point> points; };
  struct Budgeted { double value, budget, steep_slope; };
  struct Oscillatory { double amplitude; bool cos_variant; };
  struct Shifted {
    std::shared_ptr<const UtilitySpec> inner;
    double price_shift, payoff_shift;
  };
  struct PriceMapped {
    std::shared_ptr<const UtilitySpec> inner;
    PriceMap map;
  };
  using Node = std::variant<Quasilinear, PiecewiseLinear, Budgeted,
                            Oscillatory, Shifted, PriceMapped>;
  const Node& node() const { return node_; }

 private:
  explicit UtilitySpec(Node node) : node_(std::move(node)) {}
  Node node_;
};

// Verdict-returning form of UtilitySpec::validate.
inline ValidationResult validate_spec(const UtilitySpec& spec) {
  return spec.validate();
}

// Curve for the transformed market of a bounded-equilibrium solve:
// u'(x) = u(x + price_bound) - payoff_bound.
UtilitySpec shift_for_bounds(const UtilitySpec& spec, double price_bound,
                             double payoff_bound);

// Curve seen by a buyer facing personalized prices: u'(x) = u(g(x)).
UtilitySpec apply_price_map(const UtilitySpec& spec, const PriceMap& map);

}  // namespace ce
