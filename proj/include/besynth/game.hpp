#pragma once

#include <vector>

#include "besynth/arena.hpp"

namespace besynth {

// The outcome of one reachability solve. All three vectors are indexed by
// arena state id; strategy and rank are -1 outside the region. For states
// that joined at rank k > 0 the strategy action is a witness: every reaction
// (adversarial) or some reaction (cooperative) moves to a state of rank < k.
// Target states have rank 0 and carry their smallest legal action.
struct GameResult {
    std::vector<char> region;
    std::vector<int> strategy;
    std::vector<int> rank;

    bool inRegion(int t) const { return region.at(t) != 0; }
};

// Least fixpoint of the controllable predecessor: from every region state
// the agent can force a target visit whatever the environment replies.
// Witness actions are picked smallest-first among those completing at the
// joining iteration, so results are deterministic.
GameResult solveAdversarialReach(const Arena& a, const std::vector<char>& target);

// Existential variant: from every region state some reaction sequence under
// the witness actions visits the target.
GameResult solveCooperativeReach(const Arena& a, const std::vector<char>& target);

// Reference solvers for reach-while-safe objectives: the target must be hit
// inside the safe set, and every state visited before it must be safe too
// (the fixpoint starts from safe-and-target and only safe states may join).
// They exist to machine-check that on composed arenas these regions equal
// the plain-reach regions on the error-reduced targets; the production
// pipeline never calls them.
std::vector<char> solveAdversarialSafeReach(const Arena& a, const std::vector<char>& safe,
                                            const std::vector<char>& target);
std::vector<char> solveCooperativeSafeReach(const Arena& a, const std::vector<char>& safe,
                                            const std::vector<char>& target);

// Least fixpoint of the target under a FIXED total positional strategy:
// the states from which every (universal) or some (existential) reaction
// path under kappa visits the target. This is the one-strategy special case
// of the solvers above; the strategy verifier and the spoiler environment
// policy both lean on it.
std::vector<char> reachUnder(const Arena& a, const std::vector<int>& kappa,
                             const std::vector<char>& target, bool universal);

} // namespace besynth
