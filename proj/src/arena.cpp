#include "besynth/arena.hpp"

#include <map>
#include <sstream>
#include <tuple>

#include "besynth/errors.hpp"

namespace besynth {

int Arena::findState(Part part, DomainState domain, int dfa) const {
    ArenaState probe{part, part == Part::Normal ? domain : 0, dfa};
    for (std::size_t t = 0; t < states_.size(); ++t) {
        if (states_[t] == probe) {
            return static_cast<int>(t);
        }
    }
    return -1;
}

std::string Arena::stateLabel(int t) const {
    const ArenaState& s = states_.at(t);
    std::ostringstream out;
    switch (s.part) {
    case Part::Normal:
        out << domain_.base().stateName(s.domain);
        break;
    case Part::AgentError:
        out << "agErr";
        break;
    case Part::EnvError:
        out << "envErr";
        break;
    }
    out << "|q" << s.dfa;
    return out.str();
}

std::string Arena::toDot(bool includeErrors) const {
    auto keep = [&](int t) { return includeErrors || states_[t].part == Part::Normal; };
    std::ostringstream out;
    out << "digraph arena {\n  rankdir=LR;\n  init [shape=point];\n";
    for (std::size_t t = 0; t < states_.size(); ++t) {
        if (!keep(static_cast<int>(t))) {
            continue;
        }
        out << "  " << t << " [label=\"" << stateLabel(static_cast<int>(t)) << "\", shape="
            << (rPrime_[t] ? "doublecircle" : "circle");
        if (states_[t].part != Part::Normal) {
            out << ", style=filled, fillcolor=lightgray";
        }
        out << "];\n";
    }
    out << "  init -> 0;\n";
    for (std::size_t t = 0; t < states_.size(); ++t) {
        if (!keep(static_cast<int>(t))) {
            continue;
        }
        // One edge per distinct successor, labels collected.
        std::map<int, std::string> byTarget;
        for (int a = 0; a < numActions_; ++a) {
            for (int r = 0; r < numReactions_; ++r) {
                int to = step(static_cast<int>(t), a, r);
                if (!keep(to)) {
                    continue;
                }
                std::string move = domain_.base().actions()[a] + "/" +
                                   domain_.base().reactions()[r];
                auto [it, fresh] = byTarget.emplace(to, move);
                if (!fresh) {
                    it->second += "\\n" + move;
                }
            }
        }
        for (const auto& [to, label] : byTarget) {
            out << "  " << t << " -> " << to << " [label=\"" << label << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

Arena compose(const CompletedDomain& dp, const Dfa& d, const ComposeOptions& options) {
    if (dp.base().fluents().names() != d.fluents().names()) {
        throw std::invalid_argument(
            "compose: the automaton and the domain declare different fluent sets");
    }

    Arena a;
    a.domain_ = dp;
    a.dfa_ = d;
    a.numActions_ = static_cast<int>(dp.base().actions().size());
    a.numReactions_ = static_cast<int>(dp.base().reactions().size());

    std::vector<int> everyAction(a.numActions_);
    for (int i = 0; i < a.numActions_; ++i) {
        everyAction[i] = i;
    }

    std::map<std::tuple<Part, DomainState, int>, int> ids;
    auto intern = [&](CompletedState cs, int q) {
        auto key = std::make_tuple(cs.part, cs.part == Part::Normal ? cs.state : 0, q);
        auto it = ids.find(key);
        if (it != ids.end()) {
            return it->second;
        }
        int id = static_cast<int>(a.states_.size());
        if (a.states_.size() + 1 > options.stateCap) {
            throw BudgetError("compose: state cap of " + std::to_string(options.stateCap) +
                              " states exceeded");
        }
        ids.emplace(key, id);
        a.states_.push_back({cs.part, std::get<1>(key), q});
        return id;
    };

    // The DFA consumes the initial domain state before any move is made.
    CompletedState s0 = dp.initial();
    intern(s0, d.step(d.initial(), s0.state));

    for (std::size_t t = 0; t < a.states_.size(); ++t) {
        if (options.deadline && std::chrono::steady_clock::now() > *options.deadline) {
            throw TimeoutError("arena composition exceeded its deadline");
        }
        ArenaState cur = a.states_[t]; // copy: states_ may reallocate below
        CompletedState cs{cur.part, cur.domain};
        for (int act = 0; act < a.numActions_; ++act) {
            for (int r = 0; r < a.numReactions_; ++r) {
                CompletedState next = dp.step(cs, act, r);
                int q = next.part == Part::Normal ? d.step(cur.dfa, next.state) : cur.dfa;
                a.succ_.push_back(intern(next, q));
            }
        }
        if (cur.part == Part::Normal) {
            a.legal_.push_back(dp.base().alpha(cur.domain));
        } else {
            a.legal_.push_back(everyAction);
        }
    }

    a.rPrime_.resize(a.states_.size());
    for (std::size_t t = 0; t < a.states_.size(); ++t) {
        a.rPrime_[t] = d.isFinal(a.states_[t].dfa) ? 1 : 0;
    }
    return a;
}

DomainTrace projectToDomainTrace(const Arena& a, const std::vector<int>& run) {
    if (run.empty() || run.front() != a.initial()) {
        throw std::invalid_argument("projectToDomainTrace: run must start at t0");
    }
    DomainTrace out;
    for (std::size_t i = 0; i < run.size(); ++i) {
        if (a.state(run[i]).part != Part::Normal) {
            throw std::invalid_argument("projectToDomainTrace: run contains an error state");
        }
        if (i > 0) {
            bool connected = false;
            for (int act = 0; act < a.numActions() && !connected; ++act) {
                for (int r = 0; r < a.numReactions() && !connected; ++r) {
                    connected = a.step(run[i - 1], act, r) == run[i];
                }
            }
            if (!connected) {
                throw std::invalid_argument(
                    "projectToDomainTrace: consecutive states are not connected");
            }
        }
        out.push_back(a.state(run[i]).domain);
    }
    return out;
}

} // namespace besynth
