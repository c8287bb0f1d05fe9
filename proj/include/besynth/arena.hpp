#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "besynth/dfa.hpp"
#include "besynth/domain.hpp"

namespace besynth {

struct ComposeOptions {
    // Hard cap on reachable product states; exceeding it raises BudgetError.
    std::size_t stateCap = 200000;
    // Optional cooperative deadline checked inside the exploration loop.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// A product state: where the completed domain is, paired with the DFA state
// reached on the domain trace so far. Error states keep the DFA state at
// which the error occurred.
struct ArenaState {
    Part part = Part::Normal;
    DomainState domain = 0;
    int dfa = 0;

    friend bool operator==(const ArenaState& a, const ArenaState& b) {
        return a.part == b.part && a.dfa == b.dfa &&
               (a.part != Part::Normal || a.domain == b.domain);
    }
};

// The synchronized product of a completed domain and a goal DFA, restricted
// to states reachable from the initial state. The agent moves with any
// declared action, the environment with any declared reaction; transitions
// are total. Immutable after compose().
class Arena {
public:
    std::size_t numStates() const { return states_.size(); }
    int initial() const { return 0; }
    const ArenaState& state(int t) const { return states_.at(t); }
    int numActions() const { return numActions_; }
    int numReactions() const { return numReactions_; }

    // Total transition: the successor of t under (action, reaction).
    int step(int t, int action, int reaction) const {
        return succ_.at((static_cast<std::size_t>(t) * numActions_ + action) * numReactions_ +
                        reaction);
    }

    // Actions the agent may legally pick: alpha of the domain part, or every
    // action at the error states (where no choice matters).
    const std::vector<int>& legalActions(int t) const { return legal_.at(t); }

    // Marked sets: goal states (final DFA part, any domain part) and the two
    // error families.
    bool inRPrime(int t) const { return rPrime_.at(t) != 0; }
    bool inAgErr(int t) const { return states_.at(t).part == Part::AgentError; }
    bool inEnvErr(int t) const { return states_.at(t).part == Part::EnvError; }
    const std::vector<char>& rPrimeMask() const { return rPrime_; }

    // Dense id of a product state, or -1 if it is not reachable.
    int findState(Part part, DomainState domain, int dfa) const;

    const CompletedDomain& domain() const { return domain_; }
    const Dfa& dfa() const { return dfa_; }
    std::string stateLabel(int t) const;

    // Goal states double-circled, error states filled; error states and
    // their edges can be filtered out for readable graphs.
    std::string toDot(bool includeErrors = true) const;

private:
    friend Arena compose(const CompletedDomain& dp, const Dfa& d, const ComposeOptions&);

    CompletedDomain domain_;
    Dfa dfa_;
    int numActions_ = 0;
    int numReactions_ = 0;
    std::vector<ArenaState> states_;
    std::vector<int> succ_; // (t * A + a) * R + r, dense
    std::vector<std::vector<int>> legal_;
    std::vector<char> rPrime_;
};

// Builds the reachable product. The DFA consumes the initial domain state
// immediately, so t0 = (s0, step(q0, s0)); error moves keep the DFA part.
// The DFA's fluent set must equal the domain's.
Arena compose(const CompletedDomain& dp, const Dfa& d, const ComposeOptions& options = {});

// The domain-state sequence of an error-free arena run starting at t0; the
// result is always a legal domain trace. Raises invalid_argument on runs
// that start elsewhere, touch an error state, or take a non-edge.
DomainTrace projectToDomainTrace(const Arena& a, const std::vector<int>& run);

} // namespace besynth
