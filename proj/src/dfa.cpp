#include "besynth/dfa.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "besynth/errors.hpp"

namespace besynth {

namespace {

void checkDeadline(const CompileOptions& options) {
    if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) {
        throw TimeoutError("dfa compilation exceeded its deadline");
    }
}

// One-step progression of a core-syntax obligation under an assignment. The
// result is a boolean combination of constants and X-guarded formulas: atoms
// are resolved against `a`, X stops the recursion, and Until unfolds as
// prog(rhs) | (prog(lhs) & X(lhs U rhs)).
Formula progress(FormulaManager& m, Formula f, Assignment a) {
    switch (f.op()) {
    case Op::True:
    case Op::False:
        return f;
    case Op::Atom:
        return ((a >> f.atomIndex()) & 1u) ? m.trueF() : m.falseF();
    case Op::Not:
        return m.notF(progress(m, f.lhs(), a));
    case Op::And:
        return m.andF(progress(m, f.lhs(), a), progress(m, f.rhs(), a));
    case Op::Or:
        return m.orF(progress(m, f.lhs(), a), progress(m, f.rhs(), a));
    case Op::Next:
        return f;
    case Op::Until:
        return m.orF(progress(m, f.rhs(), a),
                     m.andF(progress(m, f.lhs(), a), m.next(f)));
    default:
        throw std::logic_error("progress: formula is not in core syntax");
    }
}

// Replaces every X-guarded obligation of a state formula by its progression
// under `a`. State formulas are boolean combinations over X-terms, so bare
// atoms or Until nodes at this level indicate a broken invariant.
Formula stepState(FormulaManager& m, Formula state, Assignment a) {
    switch (state.op()) {
    case Op::True:
    case Op::False:
        return state;
    case Op::Not:
        return m.notF(stepState(m, state.lhs(), a));
    case Op::And:
        return m.andF(stepState(m, state.lhs(), a), stepState(m, state.rhs(), a));
    case Op::Or:
        return m.orF(stepState(m, state.lhs(), a), stepState(m, state.rhs(), a));
    case Op::Next:
        return progress(m, state.lhs(), a);
    default:
        throw std::logic_error("stepState: state formula has a bare non-X term");
    }
}

// Empty-remainder evaluation: every X-term is false (hence a !X!-shaped weak
// next defaults to true), the boolean skeleton folds to a constant.
bool finalState(Formula state) {
    switch (state.op()) {
    case Op::True:
        return true;
    case Op::False:
        return false;
    case Op::Not:
        return !finalState(state.lhs());
    case Op::And:
        return finalState(state.lhs()) && finalState(state.rhs());
    case Op::Or:
        return finalState(state.lhs()) || finalState(state.rhs());
    case Op::Next:
        return false;
    default:
        throw std::logic_error("finalState: state formula has a bare non-X term");
    }
}

// Collects the distinct X-guarded obligations of a state formula in
// increasing node-id order. The boolean skeleton above them may only use
// constants, Not, And and Or.
void collectBases(Formula f, std::unordered_set<std::uint32_t>& seen, std::vector<Formula>& out) {
    if (!seen.insert(f.id()).second) {
        return;
    }
    switch (f.op()) {
    case Op::True:
    case Op::False:
        return;
    case Op::Not:
        collectBases(f.lhs(), seen, out);
        return;
    case Op::And:
    case Op::Or:
        collectBases(f.lhs(), seen, out);
        collectBases(f.rhs(), seen, out);
        return;
    case Op::Next:
        out.push_back(f);
        return;
    default:
        throw std::logic_error("canonState: state formula has a bare non-X term");
    }
}

// Evaluates the boolean skeleton of a state formula under a bit-vector
// valuation of its X-guarded obligations.
bool evalState(Formula f, const std::unordered_map<std::uint32_t, std::size_t>& varIndex,
               std::uint64_t bits, std::unordered_map<std::uint32_t, bool>& memo) {
    switch (f.op()) {
    case Op::True:
        return true;
    case Op::False:
        return false;
    case Op::Next:
        return (bits >> varIndex.at(f.id())) & 1u;
    default:
        break;
    }
    auto it = memo.find(f.id());
    if (it != memo.end()) {
        return it->second;
    }
    bool v = false;
    switch (f.op()) {
    case Op::Not:
        v = !evalState(f.lhs(), varIndex, bits, memo);
        break;
    case Op::And:
        v = evalState(f.lhs(), varIndex, bits, memo) &&
            evalState(f.rhs(), varIndex, bits, memo);
        break;
    case Op::Or:
        v = evalState(f.lhs(), varIndex, bits, memo) ||
            evalState(f.rhs(), varIndex, bits, memo);
        break;
    default:
        throw std::logic_error("canonState: state formula has a bare non-X term");
    }
    memo.emplace(f.id(), v);
    return v;
}

// Rebuilds a formula from a truth table by Shannon expansion over
// vars[0..level), collapsing branches that agree. The result depends only on
// the boolean function, never on the shape of the input, so it is canonical.
Formula buildFromTable(FormulaManager& m, const std::vector<Formula>& vars, std::size_t level,
                       const std::vector<char>& table, std::size_t base) {
    if (level == 0) {
        return table[base] ? m.trueF() : m.falseF();
    }
    std::size_t half = std::size_t(1) << (level - 1);
    Formula lo = buildFromTable(m, vars, level - 1, table, base);
    Formula hi = buildFromTable(m, vars, level - 1, table, base + half);
    if (lo == hi) {
        return lo;
    }
    Formula v = vars[level - 1];
    if (hi.op() == Op::True && lo.op() == Op::False) {
        return v;
    }
    if (hi.op() == Op::False && lo.op() == Op::True) {
        return m.notF(v);
    }
    if (hi.op() == Op::True) {
        return m.orF(v, lo);
    }
    if (hi.op() == Op::False) {
        return m.andF(m.notF(v), lo);
    }
    if (lo.op() == Op::True) {
        return m.orF(m.notF(v), hi);
    }
    if (lo.op() == Op::False) {
        return m.andF(v, hi);
    }
    return m.orF(m.andF(v, hi), m.andF(m.notF(v), lo));
}

// Canonicalizes a state formula as a boolean function of its X-guarded
// obligations. Progression can only ever nest And/Or/Not over a finite pool
// of X-terms, so hashing states by this form both merges equivalent states
// and keeps their printed size bounded; plain syntactic rewriting does
// neither (absorption chains grow without bound).
Formula canonState(FormulaManager& m, Formula f) {
    std::vector<Formula> vars;
    {
        std::unordered_set<std::uint32_t> seen;
        collectBases(f, seen, vars);
    }
    std::sort(vars.begin(), vars.end(),
              [](Formula a, Formula b) { return a.id() < b.id(); });
    if (vars.size() > 16) {
        throw BudgetError("compile: state obligation mentions " + std::to_string(vars.size()) +
                          " next-terms, above the canonicalization cap of 16");
    }
    std::unordered_map<std::uint32_t, std::size_t> varIndex;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        varIndex.emplace(vars[i].id(), i);
    }
    std::vector<char> table(std::size_t(1) << vars.size());
    for (std::uint64_t bits = 0; bits < table.size(); ++bits) {
        std::unordered_map<std::uint32_t, bool> memo;
        table[bits] = evalState(f, varIndex, bits, memo) ? 1 : 0;
    }
    return buildFromTable(m, vars, vars.size(), table, 0);
}

// Expands a compact index over the set bits of `mask` into an assignment.
Assignment spreadBits(std::uint64_t compact, const std::vector<int>& bitPositions) {
    Assignment a = 0;
    for (std::size_t i = 0; i < bitPositions.size(); ++i) {
        if ((compact >> i) & 1u) {
            a |= Assignment(1) << bitPositions[i];
        }
    }
    return a;
}

std::vector<int> maskBits(Assignment mask) {
    std::vector<int> bits;
    for (int i = 0; i < 64; ++i) {
        if ((mask >> i) & 1u) {
            bits.push_back(i);
        }
    }
    return bits;
}

// Conjunction of literals describing one assignment over the given atoms.
Formula mintermFormula(FormulaManager& m, const FluentSet& fluents,
                       const std::vector<int>& bits, Assignment a) {
    if (bits.empty()) {
        return m.trueF();
    }
    Formula acc;
    for (int idx : bits) {
        Formula lit = m.atom(fluents.name(idx), idx);
        if (!((a >> idx) & 1u)) {
            lit = m.notF(lit);
        }
        acc = acc.valid() ? m.andF(acc, lit) : lit;
    }
    return acc;
}

} // namespace

bool evalGuard(Formula guard, Assignment a) {
    switch (guard.op()) {
    case Op::True:
        return true;
    case Op::False:
        return false;
    case Op::Atom:
        return (a >> guard.atomIndex()) & 1u;
    case Op::Not:
        return !evalGuard(guard.lhs(), a);
    case Op::And:
        return evalGuard(guard.lhs(), a) && evalGuard(guard.rhs(), a);
    case Op::Or:
        return evalGuard(guard.lhs(), a) || evalGuard(guard.rhs(), a);
    case Op::Implies:
        return !evalGuard(guard.lhs(), a) || evalGuard(guard.rhs(), a);
    default:
        throw std::logic_error("evalGuard: guard contains a temporal operator");
    }
}

int Dfa::step(int q, Assignment a) const {
    int found = -1;
    for (const Edge& e : edges_.at(q)) {
        if (evalGuard(e.guard, a)) {
            if (found >= 0) {
                throw std::logic_error("Dfa::step: multiple guards match in state " +
                                       std::to_string(q));
            }
            found = e.to;
        }
    }
    if (found < 0) {
        throw std::logic_error("Dfa::step: no guard matches in state " + std::to_string(q));
    }
    return found;
}

bool Dfa::accepts(const FiniteTrace& trace) const {
    if (trace.empty()) {
        throw std::invalid_argument("Dfa::accepts: trace must be nonempty");
    }
    int q = initial_;
    for (Assignment a : trace) {
        q = step(q, a);
    }
    return isFinal(q);
}

std::string Dfa::toDot() const {
    std::ostringstream out;
    out << "digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n";
    for (std::size_t q = 0; q < edges_.size(); ++q) {
        out << "  " << q << " [shape=" << (finals_[q] ? "doublecircle" : "circle") << "];\n";
    }
    out << "  init -> " << initial_ << ";\n";
    for (std::size_t q = 0; q < edges_.size(); ++q) {
        for (const Edge& e : edges_[q]) {
            std::string label = to_string(e.guard);
            out << "  " << q << " -> " << e.to << " [label=\"";
            for (char c : label) {
                if (c == '"') {
                    out << '\\';
                }
                out << c;
            }
            out << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

nlohmann::json Dfa::toJson() const {
    nlohmann::json j;
    j["fluents"] = fluents_.names();
    j["states"] = numStates();
    j["initial"] = initial_;
    std::vector<int> finals;
    for (std::size_t q = 0; q < finals_.size(); ++q) {
        if (finals_[q]) {
            finals.push_back(static_cast<int>(q));
        }
    }
    j["finals"] = finals;
    nlohmann::json transitions = nlohmann::json::array();
    for (std::size_t q = 0; q < edges_.size(); ++q) {
        for (const Edge& e : edges_[q]) {
            transitions.push_back(
                {{"from", q}, {"guard", to_string(e.guard)}, {"to", e.to}});
        }
    }
    j["transitions"] = std::move(transitions);
    return j;
}

Dfa compile(const std::shared_ptr<FormulaManager>& mgr, Formula f, const FluentSet& fluents,
            const CompileOptions& options) {
    // Reject atoms outside the declared vocabulary up front.
    std::function<void(Formula)> checkAtoms = [&](Formula g) {
        switch (g.op()) {
        case Op::True:
        case Op::False:
            return;
        case Op::Atom: {
            int idx = fluents.index(g.atomName());
            if (idx < 0 || idx != g.atomIndex()) {
                throw std::invalid_argument("compile: atom '" + g.atomName() +
                                            "' is not declared in the fluent set");
            }
            return;
        }
        case Op::Not:
        case Op::Next:
        case Op::WeakNext:
        case Op::Eventually:
        case Op::Always:
            checkAtoms(g.lhs());
            return;
        default:
            checkAtoms(g.lhs());
            checkAtoms(g.rhs());
        }
    };
    checkAtoms(f);

    FormulaManager& m = *mgr;
    // The initial state carries the whole formula as a single X-guarded
    // obligation: traces are nonempty, so the first letter always discharges
    // it, and the (irrelevant) empty-trace answer is simply "reject".
    Formula start = canonState(m, m.next(desugar(mgr, f)));

    std::vector<Formula> states{start};
    std::unordered_map<std::uint32_t, int> ids{{start.id(), 0}};
    std::vector<std::vector<Dfa::Edge>> edges;
    std::vector<char> finals;
    std::vector<std::string> labels;

    for (std::size_t q = 0; q < states.size(); ++q) {
        checkDeadline(options);
        Formula psi = states[q];
        finals.push_back(finalState(psi) ? 1 : 0);
        labels.push_back(to_string(psi));

        std::vector<int> bits = maskBits(atomMask(psi));
        if (bits.size() > 20) {
            throw BudgetError("compile: state mentions " + std::to_string(bits.size()) +
                              " atoms, above the per-state enumeration cap of 20");
        }

        // Partition the assignment space over the mentioned atoms by
        // successor; assignments of unmentioned fluents cannot matter.
        std::vector<int> targets;                  // first-encounter order
        std::vector<std::vector<Assignment>> cover; // minterms per target
        std::uint64_t count = std::uint64_t(1) << bits.size();
        for (std::uint64_t compact = 0; compact < count; ++compact) {
            Assignment a = spreadBits(compact, bits);
            Formula succ = canonState(m, stepState(m, psi, a));
            int succId;
            auto it = ids.find(succ.id());
            if (it != ids.end()) {
                succId = it->second;
            } else {
                succId = static_cast<int>(states.size());
                if (states.size() + 1 > options.stateCap) {
                    throw BudgetError("compile: state cap of " +
                                      std::to_string(options.stateCap) + " states exceeded");
                }
                ids.emplace(succ.id(), succId);
                states.push_back(succ);
            }
            auto pos = std::find(targets.begin(), targets.end(), succId);
            if (pos == targets.end()) {
                targets.push_back(succId);
                cover.push_back({a});
            } else {
                cover[pos - targets.begin()].push_back(a);
            }
        }

        std::vector<Dfa::Edge> row;
        for (std::size_t k = 0; k < targets.size(); ++k) {
            Formula guard;
            if (targets.size() == 1) {
                guard = m.trueF(); // every assignment agrees
            } else {
                for (Assignment a : cover[k]) {
                    Formula term = mintermFormula(m, fluents, bits, a);
                    guard = guard.valid() ? m.orF(guard, term) : term;
                }
                guard = canon(mgr, guard);
            }
            row.push_back({guard, targets[k]});
        }
        edges.push_back(std::move(row));
    }

    Dfa d;
    d.manager_ = mgr;
    d.fluents_ = fluents;
    d.initial_ = 0;
    d.edges_ = std::move(edges);
    d.finals_ = std::move(finals);
    d.labels_ = std::move(labels);
    if (options.minimize) {
        return minimize(d);
    }
    return d;
}

Dfa minimize(const Dfa& d) {
    const int n = static_cast<int>(d.numStates());
    if (n == 0) {
        return d;
    }

    // Letters: assignments over the union of atoms mentioned by any guard.
    Assignment support = 0;
    for (int q = 0; q < n; ++q) {
        for (const Dfa::Edge& e : d.edges(q)) {
            support |= atomMask(e.guard);
        }
    }
    std::vector<int> bits = maskBits(support);
    if (bits.size() > 20) {
        throw BudgetError("minimize: guard support of " + std::to_string(bits.size()) +
                          " atoms is above the enumeration cap of 20");
    }
    std::uint64_t numLetters = std::uint64_t(1) << bits.size();
    std::vector<Assignment> letters(numLetters);
    for (std::uint64_t i = 0; i < numLetters; ++i) {
        letters[i] = spreadBits(i, bits);
    }

    std::vector<std::vector<int>> succ(n, std::vector<int>(numLetters));
    for (int q = 0; q < n; ++q) {
        for (std::uint64_t i = 0; i < numLetters; ++i) {
            succ[q][i] = d.step(q, letters[i]);
        }
    }

    // Moore refinement from the finality partition; class ids are assigned by
    // first occurrence for determinism.
    std::vector<int> cls(n);
    for (int q = 0; q < n; ++q) {
        cls[q] = d.isFinal(q) ? 1 : 0;
    }
    {
        // Normalize the seed partition to first-occurrence numbering.
        std::map<int, int> renumber;
        for (int q = 0; q < n; ++q) {
            auto it = renumber.emplace(cls[q], static_cast<int>(renumber.size())).first;
            cls[q] = it->second;
        }
    }
    while (true) {
        std::map<std::vector<int>, int> bySignature;
        std::vector<int> next(n);
        for (int q = 0; q < n; ++q) {
            std::vector<int> sig;
            sig.reserve(numLetters + 1);
            sig.push_back(cls[q]);
            for (std::uint64_t i = 0; i < numLetters; ++i) {
                sig.push_back(cls[succ[q][i]]);
            }
            auto it = bySignature.emplace(std::move(sig),
                                          static_cast<int>(bySignature.size())).first;
            next[q] = it->second;
        }
        bool stable = std::equal(cls.begin(), cls.end(), next.begin());
        cls = std::move(next);
        if (stable) {
            break;
        }
    }

    int numClasses = *std::max_element(cls.begin(), cls.end()) + 1;
    std::vector<int> representative(numClasses, -1);
    for (int q = 0; q < n; ++q) {
        if (representative[cls[q]] < 0) {
            representative[cls[q]] = q;
        }
    }

    int initialClass = cls[d.initial()];
    // Nonempty-trace refinement: if nothing transitions into the initial
    // state's class, its own finality is unobservable, so it may merge into a
    // class with the same successor signature.
    {
        bool hasIncoming = false;
        for (int q = 0; q < n && !hasIncoming; ++q) {
            for (std::uint64_t i = 0; i < numLetters && !hasIncoming; ++i) {
                if (cls[succ[q][i]] == initialClass) {
                    hasIncoming = true;
                }
            }
        }
        if (!hasIncoming) {
            int rep0 = representative[initialClass];
            for (int c = 0; c < numClasses; ++c) {
                if (c == initialClass) {
                    continue;
                }
                int rep = representative[c];
                bool same = true;
                for (std::uint64_t i = 0; i < numLetters && same; ++i) {
                    same = cls[succ[rep0][i]] == cls[succ[rep][i]];
                }
                if (same) {
                    initialClass = c; // drop the old initial class entirely
                    break;
                }
            }
        }
    }

    // Renumber reachable classes by BFS from the initial class, walking each
    // representative's guard list in order.
    std::vector<int> newId(numClasses, -1);
    std::vector<int> order;
    newId[initialClass] = 0;
    order.push_back(initialClass);
    for (std::size_t head = 0; head < order.size(); ++head) {
        int rep = representative[order[head]];
        for (const Dfa::Edge& e : d.edges(rep)) {
            int c = cls[e.to];
            if (newId[c] < 0) {
                newId[c] = static_cast<int>(order.size());
                order.push_back(c);
            }
        }
    }

    Dfa out;
    out.manager_ = d.manager();
    out.fluents_ = d.fluents();
    out.initial_ = 0;
    out.edges_.resize(order.size());
    out.finals_.resize(order.size());
    out.labels_.resize(order.size());
    FormulaManager& m = *d.manager();
    for (std::size_t i = 0; i < order.size(); ++i) {
        int rep = representative[order[i]];
        out.finals_[i] = d.isFinal(rep) ? 1 : 0;
        out.labels_[i] = d.stateLabel(rep);
        // Merge guards that now share a target class.
        std::vector<int> targets;
        std::vector<Formula> guards;
        for (const Dfa::Edge& e : d.edges(rep)) {
            int t = newId[cls[e.to]];
            auto pos = std::find(targets.begin(), targets.end(), t);
            if (pos == targets.end()) {
                targets.push_back(t);
                guards.push_back(e.guard);
            } else {
                guards[pos - targets.begin()] =
                    m.orF(guards[pos - targets.begin()], e.guard);
            }
        }
        for (std::size_t k = 0; k < targets.size(); ++k) {
            Formula g = targets.size() == 1 ? m.trueF()
                                            : canon(d.manager(), guards[k]);
            out.edges_[i].push_back({g, targets[k]});
        }
    }
    return out;
}

} // namespace besynth
