#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "besynth/ltlf.hpp"

namespace besynth {

struct CompileOptions {
    // Hard cap on discovered automaton states; exceeding it raises BudgetError.
    std::size_t stateCap = 200000;
    // Language-preserving minimization runs by default.
    bool minimize = true;
    // Optional cooperative deadline checked inside the exploration loop.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// A deterministic finite automaton over fluent assignments. Transitions are
// stored per state as an ordered list of (guard, successor) edges whose
// guards are mutually exclusive and exhaustive propositional formulas, so a
// step never enumerates the full assignment space. Acceptance is over
// nonempty traces; what the automaton would say about the empty trace is
// meaningless and unspecified.
class Dfa {
public:
    struct Edge {
        Formula guard;
        int to;
    };

    std::size_t numStates() const { return edges_.size(); }
    int initial() const { return initial_; }
    bool isFinal(int q) const { return finals_.at(q) != 0; }
    const std::vector<char>& finals() const { return finals_; }
    const std::vector<Edge>& edges(int q) const { return edges_.at(q); }
    const FluentSet& fluents() const { return fluents_; }
    const std::shared_ptr<FormulaManager>& manager() const { return manager_; }

    // Debug label: the normalized obligation the state was built from (the
    // representative's, after minimization).
    const std::string& stateLabel(int q) const { return labels_.at(q); }

    // Successor under one assignment. Exactly one guard must match; anything
    // else signals a broken automaton and raises std::logic_error.
    int step(int q, Assignment a) const;

    // Runs the automaton over a nonempty trace and reports acceptance.
    bool accepts(const FiniteTrace& trace) const;

    std::string toDot() const;

    // {"fluents", "states", "initial", "finals", "transitions":[{from,guard,to}]}
    nlohmann::json toJson() const;

private:
    friend Dfa compile(const std::shared_ptr<FormulaManager>&, Formula, const FluentSet&,
                       const CompileOptions&);
    friend Dfa minimize(const Dfa&);

    std::shared_ptr<FormulaManager> manager_;
    FluentSet fluents_;
    int initial_ = 0;
    std::vector<std::vector<Edge>> edges_;
    std::vector<char> finals_;
    std::vector<std::string> labels_;
};

// Translates an LTLf formula into an equivalent DFA: for every nonempty trace
// t over `fluents`, compile(f).accepts(t) == evaluate(f, t, 0). All atoms of
// f must belong to `fluents`. States are canonicalized progressed
// obligations; discovery order is deterministic (BFS, assignments enumerated
// in numeric order over the state's atom support).
Dfa compile(const std::shared_ptr<FormulaManager>& mgr, Formula f, const FluentSet& fluents,
            const CompileOptions& options = {});

// Language-equivalent minimization (nonempty traces): Moore partition
// refinement, plus merging an initial state that has no incoming transitions
// into a successor-equivalent state (empty-trace acceptance is don't-care).
// States are renumbered by BFS from the initial state.
Dfa minimize(const Dfa& d);

// Evaluates a propositional guard on an assignment.
bool evalGuard(Formula guard, Assignment a);

} // namespace besynth
