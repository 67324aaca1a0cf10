#pragma once

#include "ce/market.hpp"
#include "ce/solver.hpp"

namespace ce {

// Lattice infimum in the price order: componentwise-min prices,
// componentwise-max payoffs; each buyer keeps her match from the equilibrium
// where she does at least as well (a's on ties).
Equilibrium meet(const Equilibrium& a, const Equilibrium& b);

// Lattice supremum: componentwise-max prices, componentwise-min payoffs;
// each buyer keeps her match from the equilibrium where she does worse (b's
// on ties).
Equilibrium join(const Equilibrium& a, const Equilibrium& b);

// Point on the continuum between the lowest and highest equilibria: the
// lowest equilibrium whose prices dominate (1-t)*lowest + t*highest. The
// market is padded square internally (dummy agents with u(x) = -x) and the
// result is restricted back; t=0 gives the lowest equilibrium, t=1 the
// highest, and prices are monotone in t.
Equilibrium interpolate_continuum(const Market& market, double t,
                                  const SolveOptions& opts = {});

}  // namespace ce
