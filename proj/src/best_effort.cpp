#include "besynth/best_effort.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "besynth/errors.hpp"

namespace besynth {

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> fluentNamesOf(const Domain& d, DomainState s) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < d.fluents().size(); ++i) {
        if (s & (Assignment{1} << i)) names.push_back(d.fluents().name(i));
    }
    return names;
}

const char* partName(Part p) {
    switch (p) {
    case Part::Normal: return "normal";
    case Part::AgentError: return "agentError";
    default: return "envError";
    }
}

} // namespace

std::string to_string(Classification c) {
    switch (c) {
    case Classification::Winning: return "winning";
    case Classification::Pending: return "pending";
    default: return "losing";
    }
}

std::vector<char> adversarialTarget(const Arena& a) {
    std::vector<char> m(a.numStates(), 0);
    for (int t = 0; t < static_cast<int>(a.numStates()); ++t) {
        m[t] = !a.inAgErr(t) && (a.inEnvErr(t) || a.inRPrime(t)) ? 1 : 0;
    }
    return m;
}

std::vector<char> cooperativeTarget(const Arena& a) {
    std::vector<char> m(a.numStates(), 0);
    for (int t = 0; t < static_cast<int>(a.numStates()); ++t) {
        m[t] = a.state(t).part == Part::Normal && a.inRPrime(t) ? 1 : 0;
    }
    return m;
}

BestEffortStrategy synthesize(const Domain& d, Formula goal, const SynthesisOptions& options) {
    const auto started = Clock::now();

    const ValidationReport check = validateDomain(d);
    if (!check.ok()) {
        const DomainViolation& v = check.violations.front();
        throw ValidationError("domain breaks rule " + v.rule + " at state " + d.stateName(v.state) +
                              ": " + v.detail +
                              (check.violations.size() > 1
                                   ? " (+" + std::to_string(check.violations.size() - 1) + " more)"
                                   : ""));
    }

    BestEffortStrategy s;
    auto stage = Clock::now();
    const Dfa dfa =
        compile(goal.manager()->shared_from_this(), goal, d.fluents(), options.compile);
    s.timings_.dfaMs = msSince(stage);

    stage = Clock::now();
    s.arena_ = compose(completeDomain(d), dfa, options.compose);
    s.timings_.arenaMs = msSince(stage);

    stage = Clock::now();
    s.adv_ = solveAdversarialReach(s.arena_, adversarialTarget(s.arena_));
    s.timings_.advMs = msSince(stage);

    stage = Clock::now();
    s.coop_ = solveCooperativeReach(s.arena_, cooperativeTarget(s.arena_));
    s.timings_.coopMs = msSince(stage);

    stage = Clock::now();
    s.kappa_.resize(s.arena_.numStates());
    for (int t = 0; t < static_cast<int>(s.arena_.numStates()); ++t) {
        if (s.adv_.inRegion(t)) {
            s.kappa_[t] = s.adv_.strategy[t];
        } else if (s.coop_.inRegion(t)) {
            s.kappa_[t] = s.coop_.strategy[t];
        } else {
            s.kappa_[t] = s.arena_.legalActions(t).front();
        }
    }
    const int t0 = s.arena_.initial();
    s.classification_ = s.adv_.inRegion(t0)    ? Classification::Winning
                        : s.coop_.inRegion(t0) ? Classification::Pending
                                               : Classification::Losing;
    s.timings_.combineMs = msSince(stage);
    s.timings_.totalMs = msSince(started);
    return s;
}

int act(const BestEffortStrategy& s, const DomainTrace& history) {
    const Domain& d = s.arena().domain().base();
    if (!isLegalTrace(d, history)) {
        throw std::invalid_argument("history is not a legal trace of the domain");
    }
    const Dfa& dfa = s.arena().dfa();
    int q = dfa.initial();
    for (DomainState st : history) q = dfa.step(q, st);
    const int t = s.arena().findState(Part::Normal, history.back(), q);
    if (t < 0) {
        throw std::logic_error("legal history has no arena state"); // compose covers legal plays
    }
    return s.action(t);
}

BestEffortStrategy withAction(const BestEffortStrategy& s, int t, int action) {
    if (t < 0 || t >= static_cast<int>(s.arena().numStates())) {
        throw std::invalid_argument("withAction: no such arena state");
    }
    if (action < 0 || action >= s.arena().numActions()) {
        throw std::invalid_argument("withAction: no such action");
    }
    BestEffortStrategy out = s;
    out.kappa_[t] = action;
    return out;
}

VerificationReport verifyMaximality(const BestEffortStrategy& s) {
    const Arena& a = s.arena();
    const auto& kappa = s.kappa();
    const int n = static_cast<int>(a.numStates());

    // States visited by legal plays under kappa. Kappa moves that would err
    // (an illegal prescribed action, or an illegal reaction) leave the legal
    // fragment, so only normal successors are followed.
    std::vector<char> reached(n, 0);
    std::vector<int> queue{a.initial()};
    reached[a.initial()] = 1;
    while (!queue.empty()) {
        const int t = queue.back();
        queue.pop_back();
        for (int r = 0; r < a.numReactions(); ++r) {
            const int u = a.step(t, kappa[t], r);
            if (a.state(u).part == Part::Normal && !reached[u]) {
                reached[u] = 1;
                queue.push_back(u);
            }
        }
    }

    const std::vector<char> forced = reachUnder(a, kappa, adversarialTarget(a), true);
    const std::vector<char> possible = reachUnder(a, kappa, cooperativeTarget(a), false);

    VerificationReport report;
    const auto& actions = a.domain().base().actions();
    for (int t = 0; t < n; ++t) {
        if (!reached[t]) continue;
        const auto& legal = a.legalActions(t);
        if (std::find(legal.begin(), legal.end(), kappa[t]) == legal.end()) {
            report.violations.push_back({t, "legality",
                                         "action " + actions.at(kappa[t]) + " is not enabled at " +
                                             a.stateLabel(t)});
            continue;
        }
        if (s.adversarial().inRegion(t) && !forced[t]) {
            report.violations.push_back(
                {t, "strong",
                 "state " + a.stateLabel(t) +
                     " is forcing-region but some reaction path under the strategy misses the "
                     "target"});
        } else if (!s.adversarial().inRegion(t) && s.cooperative().inRegion(t) && !possible[t]) {
            report.violations.push_back(
                {t, "cooperative",
                 "state " + a.stateLabel(t) +
                     " is hoping-region but no reaction path under the strategy reaches the "
                     "goal"});
        }
    }
    return report;
}

nlohmann::json VerificationReport::toJson(const BestEffortStrategy& s) const {
    nlohmann::json out{{"ok", ok()}, {"violations", nlohmann::json::array()}};
    for (const StrategyViolation& v : violations) {
        out["violations"].push_back({{"state", s.arena().stateLabel(v.state)},
                                     {"kind", v.kind},
                                     {"detail", v.detail}});
    }
    return out;
}

nlohmann::json exportStrategy(const BestEffortStrategy& s, const std::string& format) {
    if (format != "json") {
        throw std::invalid_argument("unknown strategy export format '" + format + "'");
    }
    const Arena& a = s.arena();
    const Domain& d = a.domain().base();
    nlohmann::json entries = nlohmann::json::array();
    for (int t = 0; t < static_cast<int>(a.numStates()); ++t) {
        const ArenaState& st = a.state(t);
        nlohmann::json e{{"id", t},
                         {"part", partName(st.part)},
                         {"dfaState", st.dfa},
                         {"action", d.actions().at(s.action(t))},
                         {"inAdvRegion", s.adversarial().inRegion(t)},
                         {"inCoopRegion", s.cooperative().inRegion(t)},
                         {"goal", a.inRPrime(t)}};
        if (st.part == Part::Normal) e["state"] = fluentNamesOf(d, st.domain);
        entries.push_back(std::move(e));
    }
    return nlohmann::json{{"classification", to_string(s.classification())},
                          {"fluents", d.fluents().names()},
                          {"actions", d.actions()},
                          {"reactions", d.reactions()},
                          {"entries", std::move(entries)}};
}

} // namespace besynth
