#pragma once

#include <stdexcept>
#include <string>

namespace ce {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Price outside the domain of a utility curve (oscillatory curves are only
// defined below their amplitude).
struct DomainError : Error {
  using Error::Error;
};

// Bracketing for a numeric inverse exceeded the expansion cap; signals a
// malformed curve rather than a transient numeric issue.
struct InversionFailure : Error {
  using Error::Error;
};

// No supporting matching covers all positive-payoff buyers and
// positive-price goods; the given price/payoff pair is not an equilibrium.
struct MatchingFailure : Error {
  using Error::Error;
};

// No tight alternating path to a terminal node; the input equilibrium is not
// extremal on the requested side.
struct PathNotFound : Error {
  using Error::Error;
};

// Lattice operation on equilibria of different markets.
struct MarketMismatch : Error {
  using Error::Error;
};

// Instance exceeds a size cap of an enumeration-based routine.
struct SizeLimit : Error {
  using Error::Error;
};

// Malformed input file.
struct ParseError : Error {
  using Error::Error;
};

// Structurally well-formed input that violates a model invariant.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace ce
