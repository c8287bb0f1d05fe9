#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "besynth/errors.hpp"

namespace besynth {

// A fluent assignment: bit i is the truth value of fluent i of the governing
// FluentSet. Domain states use the same representation, so a domain trace is
// directly a FiniteTrace.
using Assignment = std::uint64_t;

// A finite, nonempty trace of fluent assignments. Instants are 0-based and
// the last instant is trace.size() - 1.
using FiniteTrace = std::vector<Assignment>;

// Operator kinds. And, Or, Implies, Next, Until are primitive connectives of
// the surface syntax; WeakNext, Eventually, Always are sugar removed by
// desugar(). True/False are nullary.
enum class Op : std::uint8_t {
    True,
    False,
    Atom,
    Not,
    And,
    Or,
    Implies,
    Next,
    WeakNext,
    Until,
    Eventually,
    Always,
};

// The declared fluent vocabulary: an ordered list of unique names over
// [A-Za-z0-9_]. Names that collide with formula keywords (true, false, X,
// WX, U, F, G) are rejected.
class FluentSet {
public:
    FluentSet() = default;
    explicit FluentSet(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t i) const { return names_.at(i); }

    // Index of a declared fluent, or -1.
    int index(const std::string& name) const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

class FormulaManager;
struct FormulaNode;

// An immutable, interned formula handle. Two formulas from the same manager
// are structurally equal iff their handles compare equal. Copying is free;
// the owning FormulaManager must outlive every handle.
class Formula {
public:
    Formula() = default;

    bool valid() const { return node_ != nullptr; }
    Op op() const;
    Formula lhs() const;
    Formula rhs() const;
    const std::string& atomName() const;
    int atomIndex() const;
    // Creation order inside the manager; used as the canonical sort key.
    std::uint32_t id() const;
    FormulaManager* manager() const;

    bool operator==(const Formula& other) const { return node_ == other.node_; }
    bool operator!=(const Formula& other) const { return node_ != other.node_; }

private:
    friend class FormulaManager;
    explicit Formula(const FormulaNode* node) : node_(node) {}

    const FormulaNode* node_ = nullptr;
};

struct FormulaNode {
    Op op;
    Formula lhs;
    Formula rhs;
    int atomIndex = -1;
    std::string atomName;
    std::uint32_t id = 0;
    FormulaManager* manager = nullptr;
};

// Hash-consing factory for formulas. Construction is thread-safe; handles are
// immutable and safe to share read-only across threads. Managers must be
// owned by a std::shared_ptr (use create()) so long-lived artifacts such as
// compiled automata can retain them.
class FormulaManager : public std::enable_shared_from_this<FormulaManager> {
public:
    static std::shared_ptr<FormulaManager> create();

    FormulaManager(const FormulaManager&) = delete;
    FormulaManager& operator=(const FormulaManager&) = delete;

    Formula trueF();
    Formula falseF();
    Formula atom(const std::string& name, int index);
    Formula notF(Formula f);
    Formula andF(Formula l, Formula r);
    Formula orF(Formula l, Formula r);
    Formula implies(Formula l, Formula r);
    Formula next(Formula f);
    Formula weakNext(Formula f);
    Formula until(Formula l, Formula r);
    Formula eventually(Formula f);
    Formula always(Formula f);

    // Generic constructor used by rewriting passes.
    Formula make(Op op, Formula l = {}, Formula r = {});

private:
    FormulaManager() = default;

    Formula intern(Op op, Formula l, Formula r, int atomIndex, const std::string& atomName);

    struct NodeKey {
        Op op;
        const FormulaNode* lhs;
        const FormulaNode* rhs;
        bool operator==(const NodeKey&) const = default;
    };
    struct NodeKeyHash {
        std::size_t operator()(const NodeKey& k) const;
    };

    std::mutex mutex_;
    std::deque<FormulaNode> nodes_;
    std::unordered_map<NodeKey, const FormulaNode*, NodeKeyHash> table_;
    std::unordered_map<std::string, const FormulaNode*> atoms_;
    Formula true_;
    Formula false_;
};

// Parses the concrete syntax
//   f ::= true | false | <fluent> | !f | f & f | f | f | f -> f
//       | X f | WX f | f U f | F f | G f | (f)
// with precedence (tightest first) {!, X, WX, F, G} > U > & > | > ->,
// U and -> right-associative, & and | left-associative. Every atom must be
// declared in `fluents`. Throws ParseError with a position on bad input and
// on undeclared atoms (naming the offending token).
Formula parse(const std::shared_ptr<FormulaManager>& mgr, const std::string& text,
              const FluentSet& fluents);

// Canonical text with every binary operator fully parenthesized;
// parse(to_string(f)) == f.
std::string to_string(Formula f);

// Rewrites to the {True, False, Atom, Not, And, Next, Until} core:
//   f | g  =>  !(!f & !g)         f -> g  =>  !(f & !g)
//   WX f   =>  !X!f               F f     =>  true U f
//   G f    =>  !(true U !f)
Formula desugar(const std::shared_ptr<FormulaManager>& mgr, Formula f);

// Finite-trace satisfaction at instant i (0 <= i <= lst). X requires a next
// instant; WX is vacuously true at the last instant; U requires its right
// operand to hold at some j in [i, lst] with the left operand holding on
// [i, j). Throws std::invalid_argument on an empty trace, std::out_of_range
// on a bad instant.
bool evaluate(Formula f, const FiniteTrace& trace, std::size_t i);

// Number of distinct subformulas (shared subterms counted once).
std::size_t size(Formula f);

// Boolean canonical form: constant folding, double-negation elimination,
// flattened n-ary And/Or with children deduplicated and sorted by node id,
// and direct complement pairs folded. Temporal operators are left intact
// (X true is *not* true on finite traces); their arguments are canonicalized.
Formula canon(const std::shared_ptr<FormulaManager>& mgr, Formula f);

// Bitmask over fluent indices of the atoms occurring anywhere in f.
Assignment atomMask(Formula f);

} // namespace besynth
