#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "besynth/best_effort.hpp"
#include "besynth/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace besynth;
using besynth::testing::randomDomain;
using besynth::testing::randomFormula;
using besynth::testing::riskySureDomain;

namespace {

// Three-state chain {} -> {f0} -> {f0,f1} where "go"/fwd advances, "go"/stay
// loops, and the lazy "rest" action (declared first) self-loops. The goal
// F (f0 & f1) can always be sabotaged by stay, but cooperation reaches it.
Domain restGoChain() {
    DomainBuilder b(FluentSet({"f0", "f1"}), {"rest", "go"}, {"fwd", "stay"});
    b.setInitial(0);
    const DomainState s0 = 0, s1 = 1, s2 = 3;
    for (DomainState s : {s0, s1}) {
        b.enable(s, 0);
        b.allow(s, 0, 0);
        b.transition(s, 0, 0, s);
        b.enable(s, 1);
        b.allow(s, 1, 0);
        b.allow(s, 1, 1);
        b.transition(s, 1, 1, s);
    }
    b.transition(s0, 1, 0, s1);
    b.transition(s1, 1, 0, s2);
    b.enable(s2, 1);
    b.allow(s2, 1, 0);
    b.transition(s2, 1, 0, s2);
    return b.build();
}

Formula goalOver(const std::shared_ptr<FormulaManager>& mgr, const Domain& d,
                 const std::string& text) {
    return parse(mgr, text, d.fluents());
}

// Every reaction path under kappa from t hits the target within depth moves.
bool forcedUnderKappa(const Arena& a, const std::vector<int>& kappa,
                      const std::vector<char>& target, int t, int depth) {
    if (target[t]) return true;
    if (depth == 0) return false;
    for (int r = 0; r < a.numReactions(); ++r) {
        if (!forcedUnderKappa(a, kappa, target, a.step(t, kappa[t], r), depth - 1)) return false;
    }
    return true;
}

// Arena states visited by legal plays under kappa (the verifier's notion of
// reachable histories), recomputed here for the mutation protocol.
std::vector<char> reachableUnderKappa(const Arena& a, const std::vector<int>& kappa) {
    std::vector<char> seen(a.numStates(), 0);
    std::vector<int> queue{a.initial()};
    seen[a.initial()] = 1;
    while (!queue.empty()) {
        const int t = queue.back();
        queue.pop_back();
        for (int r = 0; r < a.numReactions(); ++r) {
            const int u = a.step(t, kappa[t], r);
            if (a.state(u).part == Part::Normal && !seen[u]) {
                seen[u] = 1;
                queue.push_back(u);
            }
        }
    }
    return seen;
}

// The pointwise step-5 case split plus legality, asserted for every state.
void checkCaseSplit(const BestEffortStrategy& s) {
    const Arena& a = s.arena();
    for (int t = 0; t < static_cast<int>(a.numStates()); ++t) {
        const auto& legal = a.legalActions(t);
        CHECK(std::find(legal.begin(), legal.end(), s.action(t)) != legal.end());
        if (s.adversarial().inRegion(t)) {
            CHECK(s.action(t) == s.adversarial().strategy[t]);
        } else if (s.cooperative().inRegion(t)) {
            CHECK(s.action(t) == s.cooperative().strategy[t]);
        } else {
            CHECK(s.action(t) == legal.front());
        }
    }
}

} // namespace

TEST_CASE("forcible goal classifies winning and acts with the forcing action",
          "[best_effort]") {
    auto mgr = FormulaManager::create();
    Domain d = riskySureDomain();
    BestEffortStrategy s = synthesize(d, goalOver(mgr, d, "F p"));

    REQUIRE(s.classification() == Classification::Winning);
    CHECK(to_string(s.classification()) == "winning");
    const int t0 = s.arena().initial();
    const int sure = 1;
    CHECK(s.action(t0) == sure);
    CHECK(act(s, {0}) == s.adversarial().strategy[t0]);

    // a strong solution: every reaction path from t0 reaches the target
    CHECK(forcedUnderKappa(s.arena(), s.kappa(), adversarialTarget(s.arena()), t0,
                           static_cast<int>(s.arena().numStates())));
    CHECK(verifyMaximality(s).ok());
    checkCaseSplit(s);

    const StepTimings& tm = s.timings();
    for (double v : {tm.dfaMs, tm.arenaMs, tm.advMs, tm.coopMs, tm.combineMs, tm.totalMs}) {
        CHECK(v >= 0.0);
    }
}

TEST_CASE("sabotagable goal classifies pending and acts with the hoping action",
          "[best_effort]") {
    auto mgr = FormulaManager::create();
    Domain d = restGoChain();
    BestEffortStrategy s = synthesize(d, goalOver(mgr, d, "F (f0 & f1)"));

    REQUIRE(s.classification() == Classification::Pending);
    const int rest = 0, go = 1;
    // the initial state and the mid-chain state sit in hope-only territory,
    // so kappa must take the cooperative witness, not the smaller action
    CHECK_FALSE(s.adversarial().inRegion(s.arena().initial()));
    CHECK(act(s, {0}) == go);
    CHECK(act(s, {0, 1}) == go);
    const int mid = s.arena().step(s.arena().initial(), go, 0); // (s1, still hoping)
    REQUIRE(s.arena().state(mid).part == Part::Normal);
    CHECK(s.cooperative().inRegion(mid));
    CHECK_FALSE(s.adversarial().inRegion(mid));
    CHECK(s.action(mid) == s.cooperative().strategy[mid]);
    CHECK(s.action(mid) != rest);

    CHECK(verifyMaximality(s).ok());
    checkCaseSplit(s);
}

TEST_CASE("unachievable goal classifies losing with a total legal strategy",
          "[best_effort]") {
    auto mgr = FormulaManager::create();
    Domain d = restGoChain();
    BestEffortStrategy s = synthesize(d, mgr->falseF());

    REQUIRE(s.classification() == Classification::Losing);
    CHECK(to_string(s.classification()) == "losing");
    CHECK_FALSE(s.cooperative().inRegion(s.arena().initial()));
    checkCaseSplit(s); // total and legal everywhere even though nothing is winnable
    CHECK(act(s, {0}) == 0);  // smallest enabled action
    CHECK(verifyMaximality(s).ok());
}

TEST_CASE("synthesize rejects broken inputs", "[best_effort]") {
    auto mgr = FormulaManager::create();

    SECTION("domain violating the rules") {
        DomainBuilder b(FluentSet({"p"}), {"a"}, {"r"});
        b.enable(0, 0); // enabled but no legal reaction: breaks R2
        Domain d = b.build();
        REQUIRE_THROWS_MATCHES(synthesize(d, mgr->trueF()), ValidationError,
                               Catch::Matchers::MessageMatches(
                                   Catch::Matchers::ContainsSubstring("R2")));
    }
    SECTION("goal over foreign atoms") {
        Domain d = riskySureDomain();
        Formula foreign = parse(mgr, "F q", FluentSet({"q"}));
        REQUIRE_THROWS_AS(synthesize(d, foreign), std::invalid_argument);
    }
    SECTION("state budget") {
        Domain d = riskySureDomain();
        SynthesisOptions opt;
        opt.compose.stateCap = 1;
        REQUIRE_THROWS_AS(synthesize(d, goalOver(mgr, d, "F p"), opt), BudgetError);
    }
    SECTION("illegal histories are rejected by act") {
        Domain d = riskySureDomain();
        BestEffortStrategy s = synthesize(d, goalOver(mgr, d, "F p"));
        CHECK_THROWS_AS(act(s, {}), std::invalid_argument);
        CHECK_THROWS_AS(act(s, {1}), std::invalid_argument);       // wrong start
        CHECK_THROWS_AS(act(s, {0, 0, 1, 0}), std::invalid_argument); // {p} cannot drop p
    }
}

TEST_CASE("verifier flags a deliberately broken strategy", "[best_effort]") {
    auto mgr = FormulaManager::create();
    Domain d = riskySureDomain();
    BestEffortStrategy s = synthesize(d, goalOver(mgr, d, "F p"));
    const int t0 = s.arena().initial();
    const int risky = 0;

    // "risky" can be bounced back forever, so prescribing it at t0 breaks
    // the forcing promise; the report must name that state.
    BestEffortStrategy broken = withAction(s, t0, risky);
    VerificationReport report = verifyMaximality(broken);
    REQUIRE_FALSE(report.ok());
    CHECK(report.violations.front().state == t0);
    CHECK(report.violations.front().kind == "strong");

    const auto doc = report.toJson(broken);
    CHECK(doc.at("ok") == false);
    CHECK(doc.at("violations").at(0).at("kind") == "strong");

    CHECK_THROWS_AS(withAction(s, -1, risky), std::invalid_argument);
    CHECK_THROWS_AS(withAction(s, t0, 99), std::invalid_argument);
}

TEST_CASE("strategy export is a faithful, re-importable table", "[best_effort]") {
    auto mgr = FormulaManager::create();
    Domain d = riskySureDomain();
    BestEffortStrategy s = synthesize(d, goalOver(mgr, d, "F p"));

    const auto doc = exportStrategy(s);
    CHECK(doc.at("classification") == "winning");
    CHECK(doc.at("actions") == nlohmann::json(d.actions()));
    REQUIRE(doc.at("entries").size() == s.arena().numStates());
    for (const auto& e : doc.at("entries")) {
        const int t = e.at("id").get<int>();
        CHECK(d.actionIndex(e.at("action").get<std::string>()) == s.action(t));
        CHECK(e.at("inAdvRegion").get<bool>() == s.adversarial().inRegion(t));
        CHECK(e.at("inCoopRegion").get<bool>() == s.cooperative().inRegion(t));
        if (e.at("part") == "normal") {
            CHECK(d.stateOf(e.at("state").get<std::vector<std::string>>()) ==
                  s.arena().state(t).domain);
        }
    }
    CHECK(exportStrategy(s, "json") == doc); // deterministic
    CHECK_THROWS_AS(exportStrategy(s, "yaml"), std::invalid_argument);
}

TEST_CASE("single-reaction domains collapse forcing and hoping", "[best_effort]") {
    auto mgr = FormulaManager::create();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 25; ++i) {
        Domain d = randomDomain(rng, 1 + static_cast<int>(rng() % 2),
                                1 + static_cast<int>(rng() % 3), /*numReactions=*/1);
        Formula goal = randomFormula(mgr, d.fluents(), rng, 4);
        BestEffortStrategy s = synthesize(d, goal);
        INFO("goal " << to_string(goal));

        // with one reaction there is no nondeterminism to hope against
        CHECK(s.classification() != Classification::Pending);
        if (s.classification() == Classification::Winning) {
            CHECK(forcedUnderKappa(s.arena(), s.kappa(), adversarialTarget(s.arena()),
                                   s.arena().initial(),
                                   static_cast<int>(s.arena().numStates())));
        }
        CHECK(verifyMaximality(s).ok());
    }
}

TEST_CASE("synthesized strategies verify on random instances", "[best_effort]") {
    auto mgr = FormulaManager::create();
    std::mt19937_64 rng(20240818);
    int winning = 0, pending = 0, losing = 0;
    for (int i = 0; i < 50; ++i) {
        Domain d = randomDomain(rng, 1 + static_cast<int>(rng() % 2),
                                1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3));
        Formula goal = randomFormula(mgr, d.fluents(), rng, 4);
        BestEffortStrategy s = synthesize(d, goal);
        INFO("instance " << i << ", goal " << to_string(goal));

        CHECK(verifyMaximality(s).ok());
        checkCaseSplit(s);
        switch (s.classification()) {
        case Classification::Winning: ++winning; break;
        case Classification::Pending: ++pending; break;
        default: ++losing; break;
        }
    }
    INFO("winning " << winning << ", pending " << pending << ", losing " << losing);
    CHECK(winning + pending + losing == 50);
    CHECK(winning > 0); // the mix should exercise every branch of the split
}

TEST_CASE("mutations that break the forcing promise are flagged", "[best_effort]") {
    // Every legal alternative at a reachable forcing-region state is tried;
    // whether the mutant still forces the target is decided by the
    // independent test-side fixpoint, and the verifier must flag (at that
    // very state) at least 95% of the mutants that genuinely do not.
    auto mgr = FormulaManager::create();
    std::mt19937_64 rng(99);
    int candidates = 0, flagged = 0;
    for (int i = 0; i < 500; ++i) {
        Domain d = randomDomain(rng, 2, 2 + static_cast<int>(rng() % 2),
                                1 + static_cast<int>(rng() % 3));
        Formula goal = randomFormula(mgr, d.fluents(), rng, 6);
        BestEffortStrategy s = synthesize(d, goal);
        const Arena& a = s.arena();
        const auto target = adversarialTarget(a);
        const auto reachable = reachableUnderKappa(a, s.kappa());

        for (int t = 0; t < static_cast<int>(a.numStates()); ++t) {
            if (!reachable[t] || !s.adversarial().inRegion(t) || target[t]) continue;
            for (int alt : a.legalActions(t)) {
                if (alt == s.action(t)) continue;
                BestEffortStrategy mutant = withAction(s, t, alt);
                if (besynth::testing::universalReachUnder(a, mutant.kappa(), target)[t]) {
                    continue; // the alternative happens to force the target too
                }
                ++candidates;
                const VerificationReport report = verifyMaximality(mutant);
                const bool named = std::any_of(
                    report.violations.begin(), report.violations.end(),
                    [&](const StrategyViolation& v) { return v.state == t && v.kind == "strong"; });
                if (named) ++flagged;
            }
        }
    }
    INFO("flagged " << flagged << " of " << candidates << " strategy-breaking mutants");
    REQUIRE(candidates >= 20);
    CHECK(static_cast<double>(flagged) >= 0.95 * static_cast<double>(candidates));
}
