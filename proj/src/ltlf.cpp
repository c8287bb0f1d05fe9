#include "besynth/ltlf.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace besynth {

namespace {

const std::set<std::string>& reservedWords() {
    static const std::set<std::string> words = {"true", "false", "X", "WX", "U", "F", "G"};
    return words;
}

bool isWordChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

// ---------------------------------------------------------------------------
// FluentSet

FluentSet::FluentSet(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        const std::string& n = names_[i];
        if (n.empty()) {
            throw std::invalid_argument("fluent name must be nonempty");
        }
        for (char c : n) {
            if (!isWordChar(c)) {
                throw std::invalid_argument("fluent name '" + n +
                                            "' contains a character outside [A-Za-z0-9_]");
            }
        }
        if (reservedWords().count(n)) {
            throw std::invalid_argument("fluent name '" + n + "' collides with a formula keyword");
        }
        if (!index_.emplace(n, static_cast<int>(i)).second) {
            throw std::invalid_argument("duplicate fluent name '" + n + "'");
        }
    }
}

int FluentSet::index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// Formula / FormulaManager

Op Formula::op() const { return node_->op; }
Formula Formula::lhs() const { return node_->lhs; }
Formula Formula::rhs() const { return node_->rhs; }
const std::string& Formula::atomName() const { return node_->atomName; }
int Formula::atomIndex() const { return node_->atomIndex; }
std::uint32_t Formula::id() const { return node_->id; }
FormulaManager* Formula::manager() const { return node_->manager; }

std::shared_ptr<FormulaManager> FormulaManager::create() {
    return std::shared_ptr<FormulaManager>(new FormulaManager());
}

std::size_t FormulaManager::NodeKeyHash::operator()(const NodeKey& k) const {
    std::size_t h = std::hash<int>()(static_cast<int>(k.op));
    h = h * 31 + std::hash<const void*>()(k.lhs);
    h = h * 31 + std::hash<const void*>()(k.rhs);
    return h;
}

Formula FormulaManager::intern(Op op, Formula l, Formula r, int atomIndex,
                               const std::string& atomName) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (op == Op::Atom) {
        std::string key = atomName + "#" + std::to_string(atomIndex);
        auto it = atoms_.find(key);
        if (it != atoms_.end()) {
            return Formula(it->second);
        }
        nodes_.push_back(FormulaNode{op, {}, {}, atomIndex, atomName,
                                     static_cast<std::uint32_t>(nodes_.size()), this});
        const FormulaNode* node = &nodes_.back();
        atoms_.emplace(std::move(key), node);
        return Formula(node);
    }
    NodeKey key{op, l.node_, r.node_};
    auto it = table_.find(key);
    if (it != table_.end()) {
        return Formula(it->second);
    }
    nodes_.push_back(
        FormulaNode{op, l, r, -1, "", static_cast<std::uint32_t>(nodes_.size()), this});
    const FormulaNode* node = &nodes_.back();
    table_.emplace(key, node);
    return Formula(node);
}

Formula FormulaManager::trueF() { return intern(Op::True, {}, {}, -1, ""); }
Formula FormulaManager::falseF() { return intern(Op::False, {}, {}, -1, ""); }

Formula FormulaManager::atom(const std::string& name, int index) {
    if (index < 0) {
        throw std::invalid_argument("atom '" + name + "' needs a nonnegative fluent index");
    }
    return intern(Op::Atom, {}, {}, index, name);
}

Formula FormulaManager::notF(Formula f) { return intern(Op::Not, f, {}, -1, ""); }
Formula FormulaManager::andF(Formula l, Formula r) { return intern(Op::And, l, r, -1, ""); }
Formula FormulaManager::orF(Formula l, Formula r) { return intern(Op::Or, l, r, -1, ""); }
Formula FormulaManager::implies(Formula l, Formula r) { return intern(Op::Implies, l, r, -1, ""); }
Formula FormulaManager::next(Formula f) { return intern(Op::Next, f, {}, -1, ""); }
Formula FormulaManager::weakNext(Formula f) { return intern(Op::WeakNext, f, {}, -1, ""); }
Formula FormulaManager::until(Formula l, Formula r) { return intern(Op::Until, l, r, -1, ""); }
Formula FormulaManager::eventually(Formula f) { return intern(Op::Eventually, f, {}, -1, ""); }
Formula FormulaManager::always(Formula f) { return intern(Op::Always, f, {}, -1, ""); }

Formula FormulaManager::make(Op op, Formula l, Formula r) {
    switch (op) {
    case Op::True:
    case Op::False:
        return intern(op, {}, {}, -1, "");
    case Op::Atom:
        throw std::invalid_argument("make: atoms need a name and index, use atom()");
    case Op::Not:
    case Op::Next:
    case Op::WeakNext:
    case Op::Eventually:
    case Op::Always:
        return intern(op, l, {}, -1, "");
    default:
        return intern(op, l, r, -1, "");
    }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
    enum Kind { Word, LParen, RParen, BangTok, AmpTok, PipeTok, ArrowTok, End } kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        std::size_t start = pos_;
        if (pos_ >= text_.size()) {
            current_ = {Token::End, "", start};
            return;
        }
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            current_ = {Token::LParen, "(", start};
        } else if (c == ')') {
            ++pos_;
            current_ = {Token::RParen, ")", start};
        } else if (c == '!') {
            ++pos_;
            current_ = {Token::BangTok, "!", start};
        } else if (c == '&') {
            ++pos_;
            current_ = {Token::AmpTok, "&", start};
        } else if (c == '|') {
            ++pos_;
            current_ = {Token::PipeTok, "|", start};
        } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            pos_ += 2;
            current_ = {Token::ArrowTok, "->", start};
        } else if (isWordChar(c)) {
            while (pos_ < text_.size() && isWordChar(text_[pos_])) {
                ++pos_;
            }
            current_ = {Token::Word, text_.substr(start, pos_ - start), start};
        } else {
            throw ParseError("unexpected character '" + std::string(1, c) + "' at position " +
                                 std::to_string(start),
                             start);
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_{Token::End, "", 0};
};

class Parser {
public:
    Parser(const std::shared_ptr<FormulaManager>& mgr, const std::string& text,
           const FluentSet& fluents)
        : mgr_(mgr), lexer_(text), fluents_(fluents) {}

    Formula run() {
        Formula f = parseImplies();
        const Token& t = lexer_.peek();
        if (t.kind != Token::End) {
            throw ParseError("unexpected token '" + t.text + "' at position " +
                                 std::to_string(t.pos),
                             t.pos);
        }
        return f;
    }

private:
    Formula parseImplies() {
        Formula l = parseOr();
        if (lexer_.peek().kind == Token::ArrowTok) {
            lexer_.take();
            return mgr_->implies(l, parseImplies()); // right-associative
        }
        return l;
    }

    Formula parseOr() {
        Formula f = parseAnd();
        while (lexer_.peek().kind == Token::PipeTok) {
            lexer_.take();
            f = mgr_->orF(f, parseAnd());
        }
        return f;
    }

    Formula parseAnd() {
        Formula f = parseUntil();
        while (lexer_.peek().kind == Token::AmpTok) {
            lexer_.take();
            f = mgr_->andF(f, parseUntil());
        }
        return f;
    }

    Formula parseUntil() {
        Formula l = parseUnary();
        const Token& t = lexer_.peek();
        if (t.kind == Token::Word && t.text == "U") {
            lexer_.take();
            return mgr_->until(l, parseUntil()); // right-associative
        }
        return l;
    }

    Formula parseUnary() {
        const Token& t = lexer_.peek();
        if (t.kind == Token::BangTok) {
            lexer_.take();
            return mgr_->notF(parseUnary());
        }
        if (t.kind == Token::Word) {
            if (t.text == "X") {
                lexer_.take();
                return mgr_->next(parseUnary());
            }
            if (t.text == "WX") {
                lexer_.take();
                return mgr_->weakNext(parseUnary());
            }
            if (t.text == "F") {
                lexer_.take();
                return mgr_->eventually(parseUnary());
            }
            if (t.text == "G") {
                lexer_.take();
                return mgr_->always(parseUnary());
            }
        }
        return parsePrimary();
    }

    Formula parsePrimary() {
        Token t = lexer_.take();
        switch (t.kind) {
        case Token::LParen: {
            Formula f = parseImplies();
            Token close = lexer_.take();
            if (close.kind != Token::RParen) {
                throw ParseError("expected ')' at position " + std::to_string(close.pos),
                                 close.pos);
            }
            return f;
        }
        case Token::Word: {
            if (t.text == "true") {
                return mgr_->trueF();
            }
            if (t.text == "false") {
                return mgr_->falseF();
            }
            if (t.text == "U") {
                throw ParseError("unexpected 'U' at position " + std::to_string(t.pos), t.pos);
            }
            int idx = fluents_.index(t.text);
            if (idx < 0) {
                throw ParseError("undeclared atom '" + t.text + "' at position " +
                                     std::to_string(t.pos),
                                 t.pos);
            }
            return mgr_->atom(t.text, idx);
        }
        case Token::End:
            throw ParseError("unexpected end of input at position " + std::to_string(t.pos),
                             t.pos);
        default:
            throw ParseError("unexpected token '" + t.text + "' at position " +
                                 std::to_string(t.pos),
                             t.pos);
        }
    }

    std::shared_ptr<FormulaManager> mgr_;
    Lexer lexer_;
    const FluentSet& fluents_;
};

} // namespace

Formula parse(const std::shared_ptr<FormulaManager>& mgr, const std::string& text,
              const FluentSet& fluents) {
    return Parser(mgr, text, fluents).run();
}

// ---------------------------------------------------------------------------
// Printer

namespace {

void printInto(Formula f, std::string& out);

void printBinary(Formula f, const char* opText, std::string& out) {
    out += '(';
    printInto(f.lhs(), out);
    out += ' ';
    out += opText;
    out += ' ';
    printInto(f.rhs(), out);
    out += ')';
}

void printInto(Formula f, std::string& out) {
    switch (f.op()) {
    case Op::True:
        out += "true";
        break;
    case Op::False:
        out += "false";
        break;
    case Op::Atom:
        out += f.atomName();
        break;
    case Op::Not:
        out += '!';
        printInto(f.lhs(), out);
        break;
    case Op::Next:
        out += "X ";
        printInto(f.lhs(), out);
        break;
    case Op::WeakNext:
        out += "WX ";
        printInto(f.lhs(), out);
        break;
    case Op::Eventually:
        out += "F ";
        printInto(f.lhs(), out);
        break;
    case Op::Always:
        out += "G ";
        printInto(f.lhs(), out);
        break;
    case Op::And:
        printBinary(f, "&", out);
        break;
    case Op::Or:
        printBinary(f, "|", out);
        break;
    case Op::Implies:
        printBinary(f, "->", out);
        break;
    case Op::Until:
        printBinary(f, "U", out);
        break;
    }
}

} // namespace

std::string to_string(Formula f) {
    std::string out;
    printInto(f, out);
    return out;
}

// ---------------------------------------------------------------------------
// Desugar

Formula desugar(const std::shared_ptr<FormulaManager>& mgr, Formula f) {
    std::unordered_map<std::uint32_t, Formula> memo;
    std::function<Formula(Formula)> rec = [&](Formula g) -> Formula {
        auto it = memo.find(g.id());
        if (it != memo.end()) {
            return it->second;
        }
        Formula result;
        switch (g.op()) {
        case Op::True:
        case Op::False:
        case Op::Atom:
            result = g;
            break;
        case Op::Not:
            result = mgr->notF(rec(g.lhs()));
            break;
        case Op::And:
            result = mgr->andF(rec(g.lhs()), rec(g.rhs()));
            break;
        case Op::Or:
            // f | g  =>  !(!f & !g)
            result = mgr->notF(mgr->andF(mgr->notF(rec(g.lhs())), mgr->notF(rec(g.rhs()))));
            break;
        case Op::Implies:
            // f -> g  =>  !(f & !g)
            result = mgr->notF(mgr->andF(rec(g.lhs()), mgr->notF(rec(g.rhs()))));
            break;
        case Op::Next:
            result = mgr->next(rec(g.lhs()));
            break;
        case Op::WeakNext:
            // WX f  =>  !X!f
            result = mgr->notF(mgr->next(mgr->notF(rec(g.lhs()))));
            break;
        case Op::Until:
            result = mgr->until(rec(g.lhs()), rec(g.rhs()));
            break;
        case Op::Eventually:
            // F f  =>  true U f
            result = mgr->until(mgr->trueF(), rec(g.lhs()));
            break;
        case Op::Always:
            // G f  =>  !(true U !f)
            result = mgr->notF(mgr->until(mgr->trueF(), mgr->notF(rec(g.lhs()))));
            break;
        }
        memo.emplace(g.id(), result);
        return result;
    };
    return rec(f);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

bool evalRec(Formula f, const FiniteTrace& t, std::size_t i) {
    switch (f.op()) {
    case Op::True:
        return true;
    case Op::False:
        return false;
    case Op::Atom:
        return (t[i] >> f.atomIndex()) & 1u;
    case Op::Not:
        return !evalRec(f.lhs(), t, i);
    case Op::And:
        return evalRec(f.lhs(), t, i) && evalRec(f.rhs(), t, i);
    case Op::Or:
        return evalRec(f.lhs(), t, i) || evalRec(f.rhs(), t, i);
    case Op::Implies:
        return !evalRec(f.lhs(), t, i) || evalRec(f.rhs(), t, i);
    case Op::Next:
        return i + 1 < t.size() && evalRec(f.lhs(), t, i + 1);
    case Op::WeakNext:
        return i + 1 >= t.size() || evalRec(f.lhs(), t, i + 1);
    case Op::Until:
        for (std::size_t j = i; j < t.size(); ++j) {
            if (evalRec(f.rhs(), t, j)) {
                return true;
            }
            if (!evalRec(f.lhs(), t, j)) {
                return false;
            }
        }
        return false;
    case Op::Eventually:
        for (std::size_t j = i; j < t.size(); ++j) {
            if (evalRec(f.lhs(), t, j)) {
                return true;
            }
        }
        return false;
    case Op::Always:
        for (std::size_t j = i; j < t.size(); ++j) {
            if (!evalRec(f.lhs(), t, j)) {
                return false;
            }
        }
        return true;
    }
    return false; // unreachable
}

} // namespace

bool evaluate(Formula f, const FiniteTrace& trace, std::size_t i) {
    if (trace.empty()) {
        throw std::invalid_argument("evaluate: trace must be nonempty");
    }
    if (i >= trace.size()) {
        throw std::out_of_range("evaluate: instant " + std::to_string(i) +
                                " is out of range for a trace of length " +
                                std::to_string(trace.size()));
    }
    return evalRec(f, trace, i);
}

std::size_t size(Formula f) {
    std::unordered_set<std::uint32_t> seen;
    std::function<void(Formula)> walk = [&](Formula g) {
        if (!seen.insert(g.id()).second) {
            return;
        }
        switch (g.op()) {
        case Op::True:
        case Op::False:
        case Op::Atom:
            break;
        case Op::Not:
        case Op::Next:
        case Op::WeakNext:
        case Op::Eventually:
        case Op::Always:
            walk(g.lhs());
            break;
        default:
            walk(g.lhs());
            walk(g.rhs());
        }
    };
    walk(f);
    return seen.size();
}

// ---------------------------------------------------------------------------
// Canonical boolean form

namespace {

// Negation with double-negation elimination and constant folding only.
Formula canonNot(FormulaManager& m, Formula f) {
    if (f.op() == Op::Not) {
        return f.lhs();
    }
    if (f.op() == Op::True) {
        return m.falseF();
    }
    if (f.op() == Op::False) {
        return m.trueF();
    }
    return m.notF(f);
}

// Flattens canonical children of an n-ary And/Or, folds constants and direct
// complement pairs, deduplicates, sorts by node id and rebuilds a
// right-nested chain.
Formula canonNary(FormulaManager& m, Op op, const std::vector<Formula>& rawChildren) {
    const bool isAnd = (op == Op::And);
    Formula unit = isAnd ? m.trueF() : m.falseF();
    Formula zero = isAnd ? m.falseF() : m.trueF();

    std::vector<Formula> flat;
    std::function<void(Formula)> collect = [&](Formula c) {
        if (c.op() == op) {
            collect(c.lhs());
            collect(c.rhs());
        } else {
            flat.push_back(c);
        }
    };
    for (Formula c : rawChildren) {
        collect(c);
    }

    std::vector<Formula> kept;
    for (Formula c : flat) {
        if (c == zero) {
            return zero;
        }
        if (c == unit) {
            continue;
        }
        kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end(),
              [](Formula a, Formula b) { return a.id() < b.id(); });
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    std::unordered_set<std::uint32_t> ids;
    for (Formula c : kept) {
        ids.insert(c.id());
    }
    for (Formula c : kept) {
        if (ids.count(canonNot(m, c).id())) {
            return zero; // x together with !x
        }
    }

    if (kept.empty()) {
        return unit;
    }
    Formula acc = kept.back();
    for (std::size_t i = kept.size() - 1; i-- > 0;) {
        acc = m.make(op, kept[i], acc);
    }
    return acc;
}

Formula canonRec(FormulaManager& m, Formula f, std::unordered_map<std::uint32_t, Formula>& memo) {
    auto it = memo.find(f.id());
    if (it != memo.end()) {
        return it->second;
    }
    Formula result;
    switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
        result = f;
        break;
    case Op::Not:
        result = canonNot(m, canonRec(m, f.lhs(), memo));
        break;
    case Op::And:
    case Op::Or:
        result = canonNary(m, f.op(),
                           {canonRec(m, f.lhs(), memo), canonRec(m, f.rhs(), memo)});
        break;
    case Op::Implies:
        result = m.implies(canonRec(m, f.lhs(), memo), canonRec(m, f.rhs(), memo));
        break;
    case Op::Next:
    case Op::WeakNext:
    case Op::Eventually:
    case Op::Always:
        result = m.make(f.op(), canonRec(m, f.lhs(), memo));
        break;
    case Op::Until:
        result = m.until(canonRec(m, f.lhs(), memo), canonRec(m, f.rhs(), memo));
        break;
    }
    memo.emplace(f.id(), result);
    return result;
}

} // namespace

Formula canon(const std::shared_ptr<FormulaManager>& mgr, Formula f) {
    std::unordered_map<std::uint32_t, Formula> memo;
    return canonRec(*mgr, f, memo);
}

Assignment atomMask(Formula f) {
    Assignment mask = 0;
    std::unordered_set<std::uint32_t> seen;
    std::function<void(Formula)> walk = [&](Formula g) {
        if (!seen.insert(g.id()).second) {
            return;
        }
        switch (g.op()) {
        case Op::True:
        case Op::False:
            break;
        case Op::Atom:
            mask |= Assignment(1) << g.atomIndex();
            break;
        case Op::Not:
        case Op::Next:
        case Op::WeakNext:
        case Op::Eventually:
        case Op::Always:
            walk(g.lhs());
            break;
        default:
            walk(g.lhs());
            walk(g.rhs());
        }
    };
    walk(f);
    return mask;
}

} // namespace besynth
