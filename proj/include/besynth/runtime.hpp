#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "besynth/best_effort.hpp"

namespace besynth {

// An environment player: given the current (normal) arena state and the
// agent's chosen action, pick a reaction from beta, or Quit to end the
// session (interactive policies only). play() rejects any reaction outside
// beta, so a policy that honors the menu it is given is always legal.
class EnvPolicy {
public:
    static constexpr int Quit = -1;

    virtual ~EnvPolicy() = default;
    virtual int react(const BestEffortStrategy& s, int arenaState, int action) = 0;
};

// Replays a fixed reaction list in order. Running past its end or scripting
// a reaction outside beta makes play() raise invalid_argument.
std::unique_ptr<EnvPolicy> scriptedPolicy(std::vector<int> reactions);

// Picks uniformly among the legal reactions; a fixed seed reproduces the
// play bit for bit.
std::unique_ptr<EnvPolicy> randomPolicy(std::uint64_t seed);

// The built-in spoiler: prefers reactions that keep the arena outside the
// set of states from which the running strategy forces its adversarial
// target (so a non-winning instance never stumbles into the goal), breaking
// ties by declared reaction order.
std::unique_ptr<EnvPolicy> adversarialOraclePolicy();

// Line-oriented human player: each round prints the state and the agent's
// action, lists the legal reactions as a numbered menu, and reads a pick.
// Bad input re-prompts; "q" or end of input quits.
std::unique_ptr<EnvPolicy> interactivePolicy(std::istream& in, std::ostream& out);

enum class StopReason { GoalReached, MaxSteps, InteractiveQuit };
std::string to_string(StopReason r);

// One finished play. states[i+1] is the successor of states[i] under
// (actions[i], reactions[i]); arenaStates tracks the product state after
// each prefix. satisfiedAtStep is the smallest k whose prefix
// states[0..k] satisfies the goal, detected via goal-state visits.
struct PlayRecord {
    DomainTrace states;
    std::vector<int> actions;
    std::vector<int> reactions;
    std::vector<int> arenaStates;
    std::optional<int> satisfiedAtStep;
    StopReason stopReason = StopReason::MaxSteps;

    // {"states": [[fluent names]..], "actions": [names], "reactions":
    //  [names], "satisfiedAtStep": k|null, "stopReason": "..."}
    nlohmann::json toJson(const Domain& d) const;
};

struct PlayOptions {
    // Hard step limit; 0 means the default of 10 x arena size (a positional
    // strategy that ever satisfies the goal does so within one arena lap).
    int maxSteps = 0;
    // Keep playing after the first goal visit instead of stopping there.
    bool continueAfterGoal = false;
};

// Drives the strategy against the policy from the initial state: the agent
// plays kappa, the environment answers, the record grows until the goal is
// reached (unless continueAfterGoal), the step limit hits, or an
// interactive player quits.
PlayRecord play(const BestEffortStrategy& s, EnvPolicy& env, const PlayOptions& options = {});

// Smallest k such that the prefix t[0..k] satisfies f, evaluated directly
// on the trace (no automaton involved).
std::optional<int> satisfiedInDomain(const DomainTrace& t, Formula f);

// play() against an interactive policy on the given streams.
PlayRecord interactiveSession(const BestEffortStrategy& s, std::istream& in, std::ostream& out,
                              const PlayOptions& options = {});

} // namespace besynth
