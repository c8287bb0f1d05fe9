#include "oracles.hpp"

#include <functional>

namespace besynth::testing {

namespace {

// Least fixpoint G = target ∪ {t | accept(t, kappa[t], G)}, where accept
// decides whether the strategy-fixed move from t makes progress into G.
std::vector<char> reachFixpoint(const Arena& a, const std::vector<int>& kappa,
                                const std::vector<char>& target,
                                const std::function<bool(int, int, const std::vector<char>&)>& accept) {
    std::vector<char> g = target;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int t = 0; t < static_cast<int>(a.numStates()); ++t) {
            if (g[static_cast<std::size_t>(t)]) continue;
            if (accept(t, kappa[static_cast<std::size_t>(t)], g)) {
                g[static_cast<std::size_t>(t)] = 1;
                changed = true;
            }
        }
    }
    return g;
}

// Runs fn once per positional legal strategy (odometer over legal actions).
void forEachStrategy(const Arena& a, const std::function<void(const std::vector<int>&)>& fn) {
    const auto n = static_cast<std::size_t>(a.numStates());
    std::vector<std::size_t> pick(n, 0);
    std::vector<int> kappa(n);
    for (;;) {
        for (std::size_t t = 0; t < n; ++t)
            kappa[t] = a.legalActions(static_cast<int>(t)).at(pick[t]);
        fn(kappa);
        std::size_t i = 0;
        while (i < n && ++pick[i] == a.legalActions(static_cast<int>(i)).size()) pick[i++] = 0;
        if (i == n) break;
    }
}

std::vector<char> bruteRegion(const Arena& a, const std::vector<char>& target, bool adversarial) {
    auto accept = [&a, adversarial](int t, int act, const std::vector<char>& g) {
        for (int r = 0; r < a.numReactions(); ++r) {
            const bool in = g[static_cast<std::size_t>(a.step(t, act, r))] != 0;
            if (adversarial && !in) return false;
            if (!adversarial && in) return true;
        }
        return adversarial;
    };
    std::vector<char> region(static_cast<std::size_t>(a.numStates()), 0);
    forEachStrategy(a, [&](const std::vector<int>& kappa) {
        const auto g = reachFixpoint(a, kappa, target, accept);
        for (std::size_t t = 0; t < g.size(); ++t)
            if (g[t]) region[t] = 1;
    });
    return region;
}

} // namespace

std::vector<char> universalReachUnder(const Arena& a, const std::vector<int>& kappa,
                                      const std::vector<char>& target) {
    return reachFixpoint(a, kappa, target, [&a](int t, int act, const std::vector<char>& g) {
        for (int r = 0; r < a.numReactions(); ++r)
            if (!g[static_cast<std::size_t>(a.step(t, act, r))]) return false;
        return true;
    });
}

std::vector<char> existentialReachUnder(const Arena& a, const std::vector<int>& kappa,
                                        const std::vector<char>& target) {
    return reachFixpoint(a, kappa, target, [&a](int t, int act, const std::vector<char>& g) {
        for (int r = 0; r < a.numReactions(); ++r)
            if (g[static_cast<std::size_t>(a.step(t, act, r))]) return true;
        return false;
    });
}

std::vector<char> bruteAdversarialRegion(const Arena& a, const std::vector<char>& target) {
    return bruteRegion(a, target, true);
}

std::vector<char> bruteCooperativeRegion(const Arena& a, const std::vector<char>& target) {
    return bruteRegion(a, target, false);
}

} // namespace besynth::testing
