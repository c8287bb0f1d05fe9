#pragma once

#include <functional>
#include <random>
#include <vector>

#include "besynth/domain.hpp"
#include "besynth/ltlf.hpp"

namespace besynth::testing {

// Random formula with at most `budget` structural nodes (so size(f) <= budget)
// over the given fluents. Distribution is fixed so seeds reproduce exactly.
Formula randomFormula(const std::shared_ptr<FormulaManager>& mgr, const FluentSet& fluents,
                      std::mt19937_64& rng, int budget);

// Calls fn with every trace of length 1..maxLen over numFluents fluents.
void forAllTraces(int numFluents, int maxLen, const std::function<void(const FiniteTrace&)>& fn);

// A random domain (fluents f0.., actions a0.., reactions r0..) that satisfies
// R1-R3 and delta totality by construction on every state of 2^F: nonempty
// action subsets, nonempty reaction subsets, distinct successors per reaction.
Domain randomDomain(std::mt19937_64& rng, int numFluents, int numActions, int numReactions);

// One fluent p, actions {risky, sure}, reactions {yes, no}. At {} the action
// "risky" may be bounced back ("no" keeps {}), while "sure" admits only
// "yes" and guarantees p; at {p} only "sure" stays enabled (self-loop). So p
// can be forced, but only by the action that comes second in declared order.
Domain riskySureDomain();

} // namespace besynth::testing
