#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "besynth/arena.hpp"
#include "besynth/dfa.hpp"
#include "besynth/domain.hpp"
#include "besynth/game.hpp"
#include "besynth/ltlf.hpp"

namespace besynth {

// How good the initial state is: the goal can be forced against every
// environment (winning), achieved with some environment help (pending), or
// not at all (losing).
enum class Classification { Winning, Pending, Losing };
std::string to_string(Classification c);

// Wall-clock milliseconds per synthesis stage.
struct StepTimings {
    double dfaMs = 0;
    double arenaMs = 0;
    double advMs = 0;
    double coopMs = 0;
    double combineMs = 0;
    double totalMs = 0;
};

struct SynthesisOptions {
    CompileOptions compile;
    ComposeOptions compose;
};

// The two solve targets, fixed by the synthesis pipeline: adversarially the
// agent is happy with a goal visit or an environment error (as long as it
// made no error itself); cooperatively only an error-free goal visit counts.
std::vector<char> adversarialTarget(const Arena& a);
std::vector<char> cooperativeTarget(const Arena& a);

// A synthesized positional strategy over the arena: the adversarial witness
// inside the forcing region, the cooperative witness inside the hoping
// region, and the smallest legal action everywhere else. Total and legal on
// every reachable state. Immutable.
class BestEffortStrategy {
public:
    const Arena& arena() const { return arena_; }
    const std::vector<int>& kappa() const { return kappa_; }
    int action(int t) const { return kappa_.at(t); }
    const GameResult& adversarial() const { return adv_; }
    const GameResult& cooperative() const { return coop_; }
    Classification classification() const { return classification_; }
    const StepTimings& timings() const { return timings_; }

private:
    friend BestEffortStrategy synthesize(const Domain&, Formula, const SynthesisOptions&);
    friend BestEffortStrategy withAction(const BestEffortStrategy&, int, int);

    Arena arena_;
    GameResult adv_;
    GameResult coop_;
    std::vector<int> kappa_;
    Classification classification_ = Classification::Losing;
    StepTimings timings_;
};

// Runs the full pipeline: validate the domain, compile the goal, complete
// and compose, solve both games, and combine the strategies. Raises
// ValidationError when the domain breaks the domain rules, BudgetError /
// TimeoutError from the configured limits, and invalid_argument when the
// goal mentions atoms outside the domain's fluents. Never fails for lack of
// a solution: losing instances still get a total, legal strategy.
BestEffortStrategy synthesize(const Domain& d, Formula goal, const SynthesisOptions& options = {});

// The strategy's action after the given history, which must be a legal
// domain trace (raises invalid_argument otherwise). The strategy is
// positional over arena states, so only the history's induced arena state
// matters.
int act(const BestEffortStrategy& s, const DomainTrace& history);

// Copy of s with the prescribed action at one arena state replaced (regions
// and classification are kept as they were). The result may no longer keep
// the strategy's promises; it exists so the verifier can be exercised
// against deliberately broken strategies.
BestEffortStrategy withAction(const BestEffortStrategy& s, int t, int action);

struct StrategyViolation {
    int state = 0; // arena state id
    std::string kind; // "strong" | "cooperative" | "legality"
    std::string detail;
};

struct VerificationReport {
    std::vector<StrategyViolation> violations;
    bool ok() const { return violations.empty(); }
    // {"ok": bool, "violations": [{"state", "kind", "detail"}]}
    nlohmann::json toJson(const BestEffortStrategy& s) const;
};

// Independently re-checks the strategy's promises on every state reachable
// under it by legal plays (error states correspond to no legal history and
// are skipped): forcing-region states must reach the adversarial target on
// EVERY reaction path, hoping-region states on SOME path, and the prescribed
// action must be enabled. Fixpoints are recomputed from the raw arena, so a
// bug in the solvers cannot vouch for itself.
VerificationReport verifyMaximality(const BestEffortStrategy& s);

// Serializes the strategy table: one entry per arena state in id order with
// the state rendering, prescribed action, region memberships, and the
// overall classification. The only supported format is "json"; anything
// else raises invalid_argument.
nlohmann::json exportStrategy(const BestEffortStrategy& s, const std::string& format = "json");

} // namespace besynth
