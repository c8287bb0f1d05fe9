#include "besynth/game.hpp"

#include <algorithm>
#include <stdexcept>

namespace besynth {

namespace {

// Shared attractor loop. A legal (state, action) move slot "completes" when
// all (adversarial) or at least one (cooperative) of its reaction successors
// are inside the region; the owning state then joins at the next rank with
// the smallest action that completed for it. `joinable` masks which states
// may ever join (the safe set for reach-while-safe, everything otherwise);
// `initial` seeds rank 0.
GameResult attract(const Arena& a, const std::vector<char>& initial,
                   const std::vector<char>* joinable, bool adversarial) {
    const int n = static_cast<int>(a.numStates());
    const int A = a.numActions();
    const int R = a.numReactions();

    // Predecessor lists over legal move slots, packed as t * A + action.
    std::vector<std::vector<int>> pred(n);
    std::vector<int> pending(static_cast<std::size_t>(n) * A, -1);
    for (int t = 0; t < n; ++t) {
        for (int act : a.legalActions(t)) {
            pending[static_cast<std::size_t>(t) * A + act] = adversarial ? R : 1;
            for (int r = 0; r < R; ++r) {
                pred[a.step(t, act, r)].push_back(t * A + act);
            }
        }
    }

    GameResult res;
    res.region.assign(n, 0);
    res.strategy.assign(n, -1);
    res.rank.assign(n, -1);

    std::vector<int> frontier;
    for (int t = 0; t < n; ++t) {
        if (initial[t]) {
            res.region[t] = 1;
            res.rank[t] = 0;
            if (!a.legalActions(t).empty()) {
                res.strategy[t] = a.legalActions(t).front();
            }
            frontier.push_back(t);
        }
    }

    int layer = 0;
    std::vector<std::pair<int, int>> completed; // (state, action), per layer
    while (!frontier.empty()) {
        ++layer;
        completed.clear();
        for (int w : frontier) {
            for (int slot : pred[w]) {
                if (--pending[slot] == 0) {
                    completed.emplace_back(slot / A, slot % A);
                }
            }
        }
        std::sort(completed.begin(), completed.end());
        frontier.clear();
        for (const auto& [t, act] : completed) {
            if (res.region[t] || (joinable && !(*joinable)[t])) {
                continue;
            }
            res.region[t] = 1;
            res.rank[t] = layer;
            res.strategy[t] = act; // smallest completing action: sorted above
            frontier.push_back(t);
        }
    }
    return res;
}

void checkMask(const Arena& a, const std::vector<char>& mask, const char* what) {
    if (mask.size() != a.numStates()) {
        throw std::invalid_argument(std::string(what) +
                                    " mask size does not match the arena");
    }
}

std::vector<char> intersect(const std::vector<char>& x, const std::vector<char>& y) {
    std::vector<char> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] && y[i];
    }
    return out;
}

} // namespace

GameResult solveAdversarialReach(const Arena& a, const std::vector<char>& target) {
    checkMask(a, target, "target");
    return attract(a, target, nullptr, true);
}

GameResult solveCooperativeReach(const Arena& a, const std::vector<char>& target) {
    checkMask(a, target, "target");
    return attract(a, target, nullptr, false);
}

std::vector<char> solveAdversarialSafeReach(const Arena& a, const std::vector<char>& safe,
                                            const std::vector<char>& target) {
    checkMask(a, safe, "safe");
    checkMask(a, target, "target");
    return attract(a, intersect(safe, target), &safe, true).region;
}

std::vector<char> solveCooperativeSafeReach(const Arena& a, const std::vector<char>& safe,
                                            const std::vector<char>& target) {
    checkMask(a, safe, "safe");
    checkMask(a, target, "target");
    return attract(a, intersect(safe, target), &safe, false).region;
}

std::vector<char> reachUnder(const Arena& a, const std::vector<int>& kappa,
                             const std::vector<char>& target, bool universal) {
    checkMask(a, target, "target");
    if (kappa.size() != a.numStates()) {
        throw std::invalid_argument("kappa size does not match the arena");
    }
    std::vector<char> g = target;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int t = 0; t < static_cast<int>(a.numStates()); ++t) {
            if (g[t]) continue;
            bool all = true, some = false;
            for (int r = 0; r < a.numReactions(); ++r) {
                const bool in = g[a.step(t, kappa[t], r)] != 0;
                all = all && in;
                some = some || in;
            }
            if (universal ? all : some) {
                g[t] = 1;
                changed = true;
            }
        }
    }
    return g;
}

} // namespace besynth
