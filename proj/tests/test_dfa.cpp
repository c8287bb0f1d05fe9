#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "besynth/dfa.hpp"
#include "besynth/errors.hpp"
#include "support.hpp"

using namespace besynth;

namespace {

FluentSet pqr() { return FluentSet({"p", "q", "r"}); }

// Exhaustive language comparison over traces of length 1..maxLen.
void checkAgainstEvaluate(const Dfa& d, Formula f, int numFluents, int maxLen) {
    testing::forAllTraces(numFluents, maxLen, [&](const FiniteTrace& t) {
        if (d.accepts(t) != evaluate(f, t, 0)) {
            FAIL("language mismatch for " << to_string(f) << " on a trace of length "
                                          << t.size());
        }
    });
}

} // namespace

TEST_CASE("compile F p yields the minimal two-state automaton", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl({"p"});
    Dfa d = compile(mgr, parse(mgr, "F p", fl), fl);
    REQUIRE(d.numStates() == 2);
    CHECK_FALSE(d.isFinal(d.initial()));
    CHECK(d.accepts({1}));
    CHECK(d.accepts({0, 0, 1}));
    CHECK_FALSE(d.accepts({0, 0}));
    checkAgainstEvaluate(d, parse(mgr, "F p", fl), 1, 5);
}

TEST_CASE("compile True folds to a single accepting state", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl({"p"});
    Dfa d = compile(mgr, mgr->trueF(), fl);
    REQUIRE(d.numStates() == 1);
    CHECK(d.isFinal(0));
    CHECK(d.accepts({0}));
    CHECK(d.accepts({1, 0, 1}));
}

TEST_CASE("compile False never accepts", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl({"p"});
    Dfa d = compile(mgr, mgr->falseF(), fl);
    REQUIRE(d.numStates() == 1);
    CHECK_FALSE(d.isFinal(0));
    CHECK_FALSE(d.accepts({1, 1}));
}

TEST_CASE("tautologies minimize to the True automaton", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl({"p"});
    Formula taut = parse(mgr, "p | !p", fl);
    Dfa raw = compile(mgr, taut, fl, {.minimize = false});
    Dfa d = minimize(raw);
    CHECK(d.numStates() == 1);
    CHECK(d.isFinal(0));
}

TEST_CASE("nested next/weak-next at end of trace", "[dfa]") {
    // X(WX q) must be false on every single-instant trace even though the
    // leftover WX q obligation would default to true.
    auto mgr = FormulaManager::create();
    FluentSet fl({"q"});
    Formula f = parse(mgr, "X (WX q)", fl);
    Dfa d = compile(mgr, f, fl);
    CHECK_FALSE(d.accepts({0}));
    CHECK_FALSE(d.accepts({1}));
    CHECK(d.accepts({0, 0}));
    checkAgainstEvaluate(d, f, 1, 4);
}

TEST_CASE("compiled automata agree with evaluate on random formulas", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl = pqr();
    std::mt19937_64 rng(20240818);
    for (int i = 0; i < 150; ++i) {
        Formula f = testing::randomFormula(mgr, fl, rng, 6);
        Dfa raw = compile(mgr, f, fl, {.minimize = false});
        Dfa min = minimize(raw);
        CHECK(min.numStates() <= raw.numStates());
        testing::forAllTraces(3, 4, [&](const FiniteTrace& t) {
            bool expected = evaluate(f, t, 0);
            if (raw.accepts(t) != expected || min.accepts(t) != expected) {
                FAIL("mismatch for " << to_string(f));
            }
        });
    }
}

TEST_CASE("guards partition the assignment space", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl = pqr();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 60; ++i) {
        Formula f = testing::randomFormula(mgr, fl, rng, 6);
        Dfa d = compile(mgr, f, fl);
        for (std::size_t q = 0; q < d.numStates(); ++q) {
            for (Assignment a = 0; a < 8; ++a) {
                int matches = 0;
                for (const Dfa::Edge& e : d.edges(q)) {
                    if (evalGuard(e.guard, a)) {
                        ++matches;
                    }
                }
                REQUIRE(matches == 1);
            }
        }
    }
}

TEST_CASE("every state is reachable", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl = pqr();
    std::mt19937_64 rng(6);
    for (int i = 0; i < 60; ++i) {
        Dfa d = compile(mgr, testing::randomFormula(mgr, fl, rng, 6), fl);
        std::set<int> seen{d.initial()};
        std::vector<int> queue{d.initial()};
        while (!queue.empty()) {
            int q = queue.back();
            queue.pop_back();
            for (const Dfa::Edge& e : d.edges(q)) {
                if (seen.insert(e.to).second) {
                    queue.push_back(e.to);
                }
            }
        }
        REQUIRE(seen.size() == d.numStates());
    }
}

TEST_CASE("minimization is idempotent and language-preserving", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl = pqr();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 40; ++i) {
        Formula f = testing::randomFormula(mgr, fl, rng, 6);
        Dfa raw = compile(mgr, f, fl, {.minimize = false});
        Dfa min1 = minimize(raw);
        Dfa min2 = minimize(min1);
        CHECK(min2.numStates() == min1.numStates());
        testing::forAllTraces(3, 3, [&](const FiniteTrace& t) {
            REQUIRE(min1.accepts(t) == raw.accepts(t));
        });
    }
}

TEST_CASE("state cap raises a budget error naming the cap", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl = pqr();
    Formula f = parse(mgr, "F (p & X (q & X r))", fl);
    try {
        compile(mgr, f, fl, {.stateCap = 1});
        FAIL("expected BudgetError");
    } catch (const BudgetError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("compile rejects undeclared atoms", "[dfa]") {
    auto mgr = FormulaManager::create();
    Formula f = mgr->atom("elsewhere", 0);
    CHECK_THROWS_AS(compile(mgr, f, FluentSet({"p"}), CompileOptions{}),
                    std::invalid_argument);
}

TEST_CASE("compilation is deterministic", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl = pqr();
    Formula f = parse(mgr, "(p U q) | G r", fl);
    Dfa a = compile(mgr, f, fl);
    Dfa b = compile(mgr, f, fl);
    CHECK(a.toJson().dump() == b.toJson().dump());
}

TEST_CASE("json export carries the pinned schema", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl({"p"});
    Dfa d = compile(mgr, parse(mgr, "F p", fl), fl);
    nlohmann::json j = d.toJson();
    REQUIRE(j.contains("fluents"));
    REQUIRE(j.contains("initial"));
    REQUIRE(j.contains("finals"));
    REQUIRE(j.contains("transitions"));
    CHECK(j["fluents"] == nlohmann::json::array({"p"}));
    for (const auto& t : j["transitions"]) {
        REQUIRE(t.contains("from"));
        REQUIRE(t.contains("guard"));
        REQUIRE(t.contains("to"));
    }
    // Guards on the wire are parseable propositional formulas.
    for (const auto& t : j["transitions"]) {
        CHECK_NOTHROW(parse(mgr, t["guard"].get<std::string>(), fl));
    }
    CHECK(d.toDot().find("doublecircle") != std::string::npos);
}

TEST_CASE("accepts rejects the empty trace", "[dfa]") {
    auto mgr = FormulaManager::create();
    FluentSet fl({"p"});
    Dfa d = compile(mgr, mgr->trueF(), fl);
    CHECK_THROWS_AS(d.accepts({}), std::invalid_argument);
}
