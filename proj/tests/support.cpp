#include "support.hpp"

#include <algorithm>

namespace besynth::testing {

Formula randomFormula(const std::shared_ptr<FormulaManager>& mgr, const FluentSet& fluents,
                      std::mt19937_64& rng, int budget) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    if (budget <= 1) {
        int roll = pick(8); // leaves are mostly atoms, sometimes constants
        if (roll == 6) {
            return mgr->trueF();
        }
        if (roll == 7) {
            return mgr->falseF();
        }
        int idx = pick(static_cast<int>(fluents.size()));
        return mgr->atom(fluents.name(idx), idx);
    }
    int roll = pick(12);
    if (roll == 0) {
        return randomFormula(mgr, fluents, rng, 1);
    }
    if (roll <= 5) { // unary
        Formula child = randomFormula(mgr, fluents, rng, budget - 1);
        switch (roll) {
        case 1:
            return mgr->notF(child);
        case 2:
            return mgr->next(child);
        case 3:
            return mgr->weakNext(child);
        case 4:
            return mgr->eventually(child);
        default:
            return mgr->always(child);
        }
    }
    // binary: split the remaining budget between the operands
    int rest = budget - 1;
    int left = rest > 1 ? 1 + pick(rest - 1) : 1;
    Formula l = randomFormula(mgr, fluents, rng, left);
    Formula r = randomFormula(mgr, fluents, rng, rest - left);
    switch (roll) {
    case 6:
    case 7:
        return mgr->andF(l, r);
    case 8:
        return mgr->orF(l, r);
    case 9:
        return mgr->implies(l, r);
    default:
        return mgr->until(l, r);
    }
}

Domain randomDomain(std::mt19937_64& rng, int numFluents, int numActions, int numReactions) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    std::vector<std::string> fluents, actions, reactions;
    for (int i = 0; i < numFluents; ++i) {
        fluents.push_back("f" + std::to_string(i));
    }
    for (int i = 0; i < numActions; ++i) {
        actions.push_back("a" + std::to_string(i));
    }
    for (int i = 0; i < numReactions; ++i) {
        reactions.push_back("r" + std::to_string(i));
    }
    DomainBuilder b(FluentSet(fluents), actions, reactions);

    int numStates = 1 << numFluents;
    std::vector<DomainState> statePool(numStates);
    for (int s = 0; s < numStates; ++s) {
        statePool[s] = static_cast<DomainState>(s);
    }
    std::vector<int> ids;
    auto subset = [&](int n, int k) { // k distinct ids out of [0, n)
        ids.resize(n);
        for (int i = 0; i < n; ++i) {
            ids[i] = i;
        }
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(k);
        std::sort(ids.begin(), ids.end());
        return ids;
    };

    b.setInitial(statePool[pick(numStates)]);
    for (DomainState s : statePool) {
        // Distinct successors per reaction need at most numStates reactions.
        int reactionCap = std::min(numReactions, numStates);
        for (int a : subset(numActions, 1 + pick(numActions))) {
            b.enable(s, a);
            std::vector<int> rs = subset(numReactions, 1 + pick(reactionCap));
            std::vector<DomainState> order(statePool);
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t i = 0; i < rs.size(); ++i) {
                b.allow(s, a, rs[i]);
                b.transition(s, a, rs[i], order[i]);
            }
        }
    }
    return b.build();
}

Domain riskySureDomain() {
    DomainBuilder b(FluentSet({"p"}), {"risky", "sure"}, {"yes", "no"});
    b.setInitial(0);
    b.enable(0, 0);
    b.enable(0, 1);
    b.enable(1, 1);
    b.allow(0, 0, 0);
    b.allow(0, 0, 1);
    b.allow(0, 1, 0);
    b.allow(1, 1, 0);
    b.transition(0, 0, 0, 1);
    b.transition(0, 0, 1, 0);
    b.transition(0, 1, 0, 1);
    b.transition(1, 1, 0, 1);
    return b.build();
}

void forAllTraces(int numFluents, int maxLen,
                  const std::function<void(const FiniteTrace&)>& fn) {
    std::uint64_t letters = std::uint64_t(1) << numFluents;
    FiniteTrace trace;
    std::function<void()> extend = [&]() {
        if (!trace.empty()) {
            fn(trace);
        }
        if (trace.size() >= static_cast<std::size_t>(maxLen)) {
            return;
        }
        for (std::uint64_t a = 0; a < letters; ++a) {
            trace.push_back(a);
            extend();
            trace.pop_back();
        }
    };
    extend();
}

} // namespace besynth::testing
