#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "besynth/ltlf.hpp"

namespace besynth {

// A domain state is a fluent bitset (bit i = fluent i of the declared set),
// the same encoding FiniteTrace uses for assignments, so a state trace can be
// fed to a formula or an automaton directly.
using DomainState = Assignment;
using DomainTrace = std::vector<DomainState>;

// A nondeterministic planning domain: the agent picks an enabled action, the
// environment answers with a legal reaction, and the transition function maps
// the pair to the next state. The three well-formedness rules are:
//   R1  every state offers some agent action        (alpha(s) nonempty)
//   R2  every enabled action admits some reaction   (beta(s,a) nonempty)
//   R3  distinct reactions lead to distinct states  (delta injective in r)
// plus totality of delta over the alpha/beta-declared pairs. Rules are
// checked by validateDomain, not by construction. Immutable after build.
class Domain {
public:
    const FluentSet& fluents() const { return fluents_; }
    DomainState initial() const { return initial_; }
    const std::vector<std::string>& actions() const { return actions_; }
    const std::vector<std::string>& reactions() const { return reactions_; }
    int actionIndex(const std::string& name) const;   // -1 when unknown
    int reactionIndex(const std::string& name) const; // -1 when unknown

    // Enabled agent actions at s, ascending by declared order.
    std::vector<int> alpha(DomainState s) const;
    // Legal environment reactions to `action` at s, ascending by declared order.
    std::vector<int> beta(DomainState s, int action) const;
    // Successor state; empty when the triple is outside alpha/beta.
    std::optional<DomainState> delta(DomainState s, int action, int reaction) const;

    // Human-readable "{f,g}" rendering, fluents in declared order.
    std::string stateName(DomainState s) const;
    // Parses a fluent-name array into a bitset state.
    DomainState stateOf(const std::vector<std::string>& fluentNames) const;

    // The loadDomain input schema, entries ordered state-major. Domains
    // carrying the no-op repair cannot be serialized (the repair is a rule
    // over all 2^|F| states, not a finite entry list) and raise logic_error.
    nlohmann::json toJson() const;

private:
    friend class DomainBuilder;
    friend Domain withNopRepair(const Domain& d);

    FluentSet fluents_;
    DomainState initial_ = 0;
    std::vector<std::string> actions_;
    std::vector<std::string> reactions_;
    std::map<DomainState, std::vector<int>> alpha_;
    std::map<std::pair<DomainState, int>, std::vector<int>> beta_;
    std::map<std::tuple<DomainState, int, int>, DomainState> delta_;
    // When set, every state additionally offers the trailing "nop" action
    // answered only by the trailing "nopr" reaction (a self-loop), and an
    // enabled action whose declared reaction set is empty accepts "nopr" as a
    // self-loop too. Kept as a rule so the repair works at any state width.
    bool nopRepair_ = false;
};

// Assembles a Domain from index-based entries; loadDomain and the benchmark
// generator both go through here so referential checks live in one place.
// enable/allow/transition reject out-of-range ids immediately; build() then
// enforces that every transition sits on a declared alpha/beta pair and that
// duplicate transitions agree, raising SchemaError otherwise.
class DomainBuilder {
public:
    DomainBuilder(FluentSet fluents, std::vector<std::string> actions,
                  std::vector<std::string> reactions);

    void setInitial(DomainState s);
    void enable(DomainState s, int action);
    void allow(DomainState s, int action, int reaction);
    void transition(DomainState s, int action, int reaction, DomainState next);
    Domain build();

private:
    Domain d_;
};

// Reads the JSON object form:
//   { "fluents": [..], "initial": [..], "actions": [..], "reactions": [..],
//     "alpha":   [{"state":[..], "actions":[..]}, ..],
//     "beta":    [{"state":[..], "action":"a", "reactions":[..]}, ..],
//     "delta":   [{"state":[..], "action":"a", "reaction":"r", "next":[..]}, ..] }
// States are fluent-name arrays; omitted alpha/beta states mean empty sets.
// Any malformed input raises SchemaError with the offending detail.
Domain loadDomain(const nlohmann::json& doc);
Domain loadDomainFile(const std::string& path);

enum class ValidationScope {
    Reachable, // states reachable from the initial state via delta
    Full       // all 2^|F| states; capped at |F| <= 20 (BudgetError above)
};

struct DomainViolation {
    std::string rule; // "R1" | "R2" | "R3" | "delta"
    DomainState state;
    std::string detail;
};

struct ValidationReport {
    std::vector<DomainViolation> violations;
    bool ok() const { return violations.empty(); }
    // {"ok": bool, "violations": [{"rule", "state":[names], "detail"}]}
    nlohmann::json toJson(const Domain& d) const;
};

// Checks R1-R3 and delta totality on the chosen state scope. Violations are
// report content, never exceptions.
ValidationReport validateDomain(const Domain& d,
                                ValidationScope scope = ValidationScope::Reachable);

// Where a completed-domain state lives: an ordinary domain state, or one of
// the two absorbing error states (agent picked a disabled action /
// environment answered with an illegal reaction).
enum class Part : std::uint8_t { Normal, AgentError, EnvError };

struct CompletedState {
    Part part = Part::Normal;
    DomainState state = 0; // meaningful only when part == Normal

    friend bool operator==(const CompletedState& a, const CompletedState& b) {
        return a.part == b.part && (a.part != Part::Normal || a.state == b.state);
    }
    friend bool operator!=(const CompletedState& a, const CompletedState& b) {
        return !(a == b);
    }
};

// The domain with transitions made total: disabled actions move to the agent
// error state, illegal reactions to the environment error state, and both
// error states absorb every further move.
class CompletedDomain {
public:
    const Domain& base() const { return base_; }
    CompletedState initial() const { return {Part::Normal, base_.initial()}; }

    // Total one-step transition over declared action/reaction ids. Raises
    // logic_error only if the underlying domain breaks delta totality, i.e.
    // it was never validated.
    CompletedState step(CompletedState t, int action, int reaction) const;

private:
    friend CompletedDomain completeDomain(const Domain& d);
    Domain base_;
};

CompletedDomain completeDomain(const Domain& d);

// The trace built by alternately applying the action/reaction sequences from
// the initial state; empty when the lengths differ or any step leaves the
// alpha/beta-declared region.
std::optional<DomainTrace> traceOf(const Domain& d, const std::vector<int>& actions,
                                   const std::vector<int>& reactions);

// True iff the trace starts at the initial state and every consecutive pair
// is witnessed by some enabled action and legal reaction.
bool isLegalTrace(const Domain& d, const DomainTrace& t);

// Copy of d with a fresh always-enabled "nop" action (self-loop under the
// fresh "nopr" reaction) and "nopr" patched in wherever an enabled action
// declared no reactions, so R1 and R2 hold everywhere. Raises
// invalid_argument if either name is already taken.
Domain withNopRepair(const Domain& d);

} // namespace besynth
