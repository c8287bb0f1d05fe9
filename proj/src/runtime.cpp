#include "besynth/runtime.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "besynth/game.hpp"

namespace besynth {

namespace {

class ScriptedPolicy final : public EnvPolicy {
public:
    explicit ScriptedPolicy(std::vector<int> reactions) : reactions_(std::move(reactions)) {}

    int react(const BestEffortStrategy&, int, int) override {
        if (next_ >= reactions_.size()) {
            throw std::invalid_argument("scripted policy exhausted after " +
                                        std::to_string(reactions_.size()) + " reactions");
        }
        return reactions_[next_++];
    }

private:
    std::vector<int> reactions_;
    std::size_t next_ = 0;
};

class RandomPolicy final : public EnvPolicy {
public:
    explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}

    int react(const BestEffortStrategy& s, int arenaState, int action) override {
        const Domain& d = s.arena().domain().base();
        const std::vector<int> legal = d.beta(s.arena().state(arenaState).domain, action);
        if (legal.empty()) {
            throw std::logic_error("no legal reaction to react to"); // validated domains have beta
        }
        return legal[rng_() % legal.size()];
    }

private:
    std::mt19937_64 rng_;
};

class AdversarialOraclePolicy final : public EnvPolicy {
public:
    int react(const BestEffortStrategy& s, int arenaState, int action) override {
        const Arena& a = s.arena();
        if (cachedFor_ != &a) {
            // where the running strategy already forces its target; staying
            // outside this set is the best the environment can do
            forced_ = reachUnder(a, s.kappa(), adversarialTarget(a), true);
            cachedFor_ = &a;
        }
        const Domain& d = a.domain().base();
        const std::vector<int> legal = d.beta(a.state(arenaState).domain, action);
        if (legal.empty()) {
            throw std::logic_error("no legal reaction to react to");
        }
        for (int r : legal) {
            if (!forced_[a.step(arenaState, action, r)]) return r;
        }
        return legal.front(); // every reaction loses; ties by declared order
    }

private:
    const Arena* cachedFor_ = nullptr;
    std::vector<char> forced_;
};

class InteractivePolicy final : public EnvPolicy {
public:
    InteractivePolicy(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

    int react(const BestEffortStrategy& s, int arenaState, int action) override {
        const Domain& d = s.arena().domain().base();
        const DomainState state = s.arena().state(arenaState).domain;
        const std::vector<int> legal = d.beta(state, action);
        out_ << "state " << d.stateName(state) << " | agent plays " << d.actions().at(action)
             << "\n";
        for (std::size_t i = 0; i < legal.size(); ++i) {
            out_ << "  [" << i + 1 << "] " << d.reactions().at(legal[i]) << "\n";
        }
        for (;;) {
            out_ << "reaction? " << std::flush;
            std::string line;
            if (!std::getline(in_, line)) return Quit;
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue; // blank line: ask again
            const auto last = line.find_last_not_of(" \t");
            line = line.substr(first, last - first + 1);
            if (line == "q" || line == "quit") return Quit;
            std::size_t used = 0;
            int pick = 0;
            try {
                pick = std::stoi(line, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == line.size() && pick >= 1 && pick <= static_cast<int>(legal.size())) {
                return legal[pick - 1];
            }
            out_ << "pick a number between 1 and " << legal.size() << ", or q to quit\n";
        }
    }

private:
    std::istream& in_;
    std::ostream& out_;
};

std::vector<std::string> fluentNamesOf(const Domain& d, DomainState s) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < d.fluents().size(); ++i) {
        if (s & (Assignment{1} << i)) names.push_back(d.fluents().name(i));
    }
    return names;
}

} // namespace

std::unique_ptr<EnvPolicy> scriptedPolicy(std::vector<int> reactions) {
    return std::make_unique<ScriptedPolicy>(std::move(reactions));
}

std::unique_ptr<EnvPolicy> randomPolicy(std::uint64_t seed) {
    return std::make_unique<RandomPolicy>(seed);
}

std::unique_ptr<EnvPolicy> adversarialOraclePolicy() {
    return std::make_unique<AdversarialOraclePolicy>();
}

std::unique_ptr<EnvPolicy> interactivePolicy(std::istream& in, std::ostream& out) {
    return std::make_unique<InteractivePolicy>(in, out);
}

std::string to_string(StopReason r) {
    switch (r) {
    case StopReason::GoalReached: return "goalReached";
    case StopReason::MaxSteps: return "maxSteps";
    default: return "interactiveQuit";
    }
}

nlohmann::json PlayRecord::toJson(const Domain& d) const {
    nlohmann::json states_ = nlohmann::json::array();
    for (DomainState s : states) states_.push_back(fluentNamesOf(d, s));
    nlohmann::json actions_ = nlohmann::json::array();
    for (int a : actions) actions_.push_back(d.actions().at(a));
    nlohmann::json reactions_ = nlohmann::json::array();
    for (int r : reactions) reactions_.push_back(d.reactions().at(r));
    nlohmann::json out{{"states", std::move(states_)},
                       {"actions", std::move(actions_)},
                       {"reactions", std::move(reactions_)},
                       {"stopReason", to_string(stopReason)}};
    out["satisfiedAtStep"] = satisfiedAtStep ? nlohmann::json(*satisfiedAtStep)
                                             : nlohmann::json(nullptr);
    return out;
}

PlayRecord play(const BestEffortStrategy& s, EnvPolicy& env, const PlayOptions& options) {
    const Arena& a = s.arena();
    const Domain& d = a.domain().base();
    if (options.maxSteps < 0) {
        throw std::invalid_argument("play: maxSteps must be positive");
    }
    const int maxSteps =
        options.maxSteps > 0 ? options.maxSteps : 10 * static_cast<int>(a.numStates());

    PlayRecord rec;
    int t = a.initial();
    rec.states.push_back(a.state(t).domain);
    rec.arenaStates.push_back(t);
    if (a.inRPrime(t)) rec.satisfiedAtStep = 0;

    for (;;) {
        if (rec.satisfiedAtStep && !options.continueAfterGoal) {
            rec.stopReason = StopReason::GoalReached;
            break;
        }
        if (static_cast<int>(rec.actions.size()) >= maxSteps) {
            rec.stopReason = StopReason::MaxSteps;
            break;
        }
        const int action = s.action(t);
        const int r = env.react(s, t, action);
        if (r == EnvPolicy::Quit) {
            rec.stopReason = StopReason::InteractiveQuit;
            break;
        }
        const std::vector<int> legal = d.beta(a.state(t).domain, action);
        if (std::find(legal.begin(), legal.end(), r) == legal.end()) {
            const std::string name = r >= 0 && r < static_cast<int>(d.reactions().size())
                                         ? d.reactions()[r]
                                         : std::to_string(r);
            throw std::invalid_argument("policy reaction '" + name + "' is not legal against " +
                                        d.actions().at(action) + " at " +
                                        d.stateName(a.state(t).domain));
        }
        t = a.step(t, action, r);
        rec.actions.push_back(action);
        rec.reactions.push_back(r);
        rec.states.push_back(a.state(t).domain);
        rec.arenaStates.push_back(t);
        if (!rec.satisfiedAtStep && a.inRPrime(t)) {
            rec.satisfiedAtStep = static_cast<int>(rec.states.size()) - 1;
        }
    }
    return rec;
}

std::optional<int> satisfiedInDomain(const DomainTrace& t, Formula f) {
    DomainTrace prefix;
    prefix.reserve(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        prefix.push_back(t[k]);
        if (evaluate(f, prefix, 0)) return static_cast<int>(k);
    }
    return std::nullopt;
}

PlayRecord interactiveSession(const BestEffortStrategy& s, std::istream& in, std::ostream& out,
                              const PlayOptions& options) {
    auto policy = interactivePolicy(in, out);
    return play(s, *policy, options);
}

} // namespace besynth
