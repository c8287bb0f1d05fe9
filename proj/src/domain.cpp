#include "besynth/domain.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "besynth/errors.hpp"

namespace besynth {

namespace {

// Looks up a name in a declared list, or -1.
int indexIn(const std::vector<std::string>& names, const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

void insertSorted(std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) {
        v.insert(it, x);
    }
}

} // namespace

int Domain::actionIndex(const std::string& name) const {
    return indexIn(actions_, name);
}

int Domain::reactionIndex(const std::string& name) const {
    return indexIn(reactions_, name);
}

std::vector<int> Domain::alpha(DomainState s) const {
    std::vector<int> out;
    auto it = alpha_.find(s);
    if (it != alpha_.end()) {
        out = it->second;
    }
    if (nopRepair_) {
        out.push_back(static_cast<int>(actions_.size()) - 1);
    }
    return out;
}

std::vector<int> Domain::beta(DomainState s, int action) const {
    if (nopRepair_) {
        int nop = static_cast<int>(actions_.size()) - 1;
        int nopr = static_cast<int>(reactions_.size()) - 1;
        if (action == nop) {
            return {nopr};
        }
        auto it = beta_.find({s, action});
        if (it != beta_.end() && !it->second.empty()) {
            return it->second;
        }
        // An enabled action with no declared reactions gets the no-op answer.
        auto al = alpha_.find(s);
        if (al != alpha_.end() &&
            std::find(al->second.begin(), al->second.end(), action) != al->second.end()) {
            return {nopr};
        }
        return {};
    }
    auto it = beta_.find({s, action});
    return it == beta_.end() ? std::vector<int>{} : it->second;
}

std::optional<DomainState> Domain::delta(DomainState s, int action, int reaction) const {
    if (nopRepair_) {
        int nop = static_cast<int>(actions_.size()) - 1;
        int nopr = static_cast<int>(reactions_.size()) - 1;
        if (action == nop) {
            return reaction == nopr ? std::optional<DomainState>(s) : std::nullopt;
        }
        if (reaction == nopr) {
            // Defined exactly where beta() patched nopr in: an enabled
            // action with no declared reactions self-loops.
            auto be = beta_.find({s, action});
            bool declared = be != beta_.end() && !be->second.empty();
            auto al = alpha_.find(s);
            bool enabled = al != alpha_.end() &&
                           std::find(al->second.begin(), al->second.end(), action) !=
                               al->second.end();
            return (enabled && !declared) ? std::optional<DomainState>(s) : std::nullopt;
        }
    }
    auto it = delta_.find({s, action, reaction});
    return it == delta_.end() ? std::nullopt : std::optional<DomainState>(it->second);
}

std::string Domain::stateName(DomainState s) const {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < fluents_.size(); ++i) {
        if ((s >> i) & 1u) {
            if (!first) {
                out += ",";
            }
            out += fluents_.name(i);
            first = false;
        }
    }
    out += "}";
    return out;
}

DomainState Domain::stateOf(const std::vector<std::string>& fluentNames) const {
    DomainState s = 0;
    for (const std::string& n : fluentNames) {
        int i = fluents_.index(n);
        if (i < 0) {
            throw SchemaError("unknown fluent '" + n + "' in state");
        }
        s |= DomainState(1) << i;
    }
    return s;
}

nlohmann::json Domain::toJson() const {
    if (nopRepair_) {
        throw std::logic_error(
            "Domain::toJson: the no-op repair is a rule over all states and "
            "has no finite entry list; serialize the unrepaired domain");
    }
    auto stateNames = [&](DomainState s) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < fluents_.size(); ++i) {
            if ((s >> i) & 1u) {
                names.push_back(fluents_.name(i));
            }
        }
        return names;
    };
    nlohmann::json j;
    j["fluents"] = fluents_.names();
    j["initial"] = stateNames(initial_);
    j["actions"] = actions_;
    j["reactions"] = reactions_;
    nlohmann::json alpha = nlohmann::json::array();
    for (const auto& [s, acts] : alpha_) {
        std::vector<std::string> names;
        for (int a : acts) {
            names.push_back(actions_[a]);
        }
        alpha.push_back({{"state", stateNames(s)}, {"actions", names}});
    }
    j["alpha"] = std::move(alpha);
    nlohmann::json beta = nlohmann::json::array();
    for (const auto& [key, reacts] : beta_) {
        std::vector<std::string> names;
        for (int r : reacts) {
            names.push_back(reactions_[r]);
        }
        beta.push_back({{"state", stateNames(key.first)},
                        {"action", actions_[key.second]},
                        {"reactions", names}});
    }
    j["beta"] = std::move(beta);
    nlohmann::json delta = nlohmann::json::array();
    for (const auto& [key, next] : delta_) {
        delta.push_back({{"state", stateNames(std::get<0>(key))},
                         {"action", actions_[std::get<1>(key)]},
                         {"reaction", reactions_[std::get<2>(key)]},
                         {"next", stateNames(next)}});
    }
    j["delta"] = std::move(delta);
    return j;
}

DomainBuilder::DomainBuilder(FluentSet fluents, std::vector<std::string> actions,
                             std::vector<std::string> reactions) {
    if (fluents.size() > 64) {
        throw SchemaError("domain declares " + std::to_string(fluents.size()) +
                          " fluents, above the 64-bit state width");
    }
    auto checkNames = [](const std::vector<std::string>& names, const char* what) {
        std::set<std::string> seen;
        for (const std::string& n : names) {
            if (n.empty()) {
                throw SchemaError(std::string("empty ") + what + " name");
            }
            if (!seen.insert(n).second) {
                throw SchemaError(std::string("duplicate ") + what + " name '" + n + "'");
            }
        }
        if (names.empty()) {
            throw SchemaError(std::string("domain declares no ") + what + "s");
        }
    };
    checkNames(actions, "action");
    checkNames(reactions, "reaction");
    d_.fluents_ = std::move(fluents);
    d_.actions_ = std::move(actions);
    d_.reactions_ = std::move(reactions);
}

void DomainBuilder::setInitial(DomainState s) {
    d_.initial_ = s;
}

void DomainBuilder::enable(DomainState s, int action) {
    if (action < 0 || action >= static_cast<int>(d_.actions_.size())) {
        throw SchemaError("enable: action id out of range");
    }
    insertSorted(d_.alpha_[s], action);
}

void DomainBuilder::allow(DomainState s, int action, int reaction) {
    if (action < 0 || action >= static_cast<int>(d_.actions_.size())) {
        throw SchemaError("allow: action id out of range");
    }
    if (reaction < 0 || reaction >= static_cast<int>(d_.reactions_.size())) {
        throw SchemaError("allow: reaction id out of range");
    }
    insertSorted(d_.beta_[{s, action}], reaction);
}

void DomainBuilder::transition(DomainState s, int action, int reaction, DomainState next) {
    if (action < 0 || action >= static_cast<int>(d_.actions_.size())) {
        throw SchemaError("transition: action id out of range");
    }
    if (reaction < 0 || reaction >= static_cast<int>(d_.reactions_.size())) {
        throw SchemaError("transition: reaction id out of range");
    }
    auto key = std::make_tuple(s, action, reaction);
    auto it = d_.delta_.find(key);
    if (it != d_.delta_.end() && it->second != next) {
        throw SchemaError("duplicate transition with conflicting successor at state " +
                          d_.stateName(s) + ", action '" + d_.actions_[action] +
                          "', reaction '" + d_.reactions_[reaction] + "'");
    }
    d_.delta_.emplace(key, next);
}

Domain DomainBuilder::build() {
    for (const auto& [key, next] : d_.delta_) {
        auto [s, a, r] = key;
        auto al = d_.alpha_.find(s);
        bool enabled = al != d_.alpha_.end() &&
                       std::find(al->second.begin(), al->second.end(), a) != al->second.end();
        if (!enabled) {
            throw SchemaError("transition without precondition: action '" + d_.actions_[a] +
                              "' is not enabled at state " + d_.stateName(s));
        }
        auto be = d_.beta_.find({s, a});
        bool allowed = be != d_.beta_.end() &&
                       std::find(be->second.begin(), be->second.end(), r) != be->second.end();
        if (!allowed) {
            throw SchemaError("transition without reaction precondition: reaction '" +
                              d_.reactions_[r] + "' is not allowed for action '" +
                              d_.actions_[a] + "' at state " + d_.stateName(s));
        }
    }
    return std::move(d_);
}

namespace {

const nlohmann::json& field(const nlohmann::json& doc, const char* name) {
    auto it = doc.find(name);
    if (it == doc.end()) {
        throw SchemaError(std::string("missing field '") + name + "'");
    }
    return *it;
}

std::vector<std::string> stringArray(const nlohmann::json& j, const char* what) {
    if (!j.is_array()) {
        throw SchemaError(std::string(what) + " must be an array of strings");
    }
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) {
            throw SchemaError(std::string(what) + " must be an array of strings");
        }
        out.push_back(e.get<std::string>());
    }
    return out;
}

} // namespace

Domain loadDomain(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw SchemaError("domain document must be a JSON object");
    }
    FluentSet fluents;
    try {
        fluents = FluentSet(stringArray(field(doc, "fluents"), "fluents"));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(e.what());
    }
    std::vector<std::string> actionNames = stringArray(field(doc, "actions"), "actions");
    std::vector<std::string> reactionNames = stringArray(field(doc, "reactions"), "reactions");

    auto stateOf = [&](const nlohmann::json& j, const char* what) {
        DomainState s = 0;
        for (const std::string& n : stringArray(j, what)) {
            int i = fluents.index(n);
            if (i < 0) {
                throw SchemaError("unknown fluent '" + n + "' in " + what);
            }
            s |= DomainState(1) << i;
        }
        return s;
    };
    auto actionOf = [&](const nlohmann::json& j, const char* where) {
        if (!j.is_string()) {
            throw SchemaError(std::string("action in ") + where + " must be a string");
        }
        int idx = indexIn(actionNames, j.get<std::string>());
        if (idx < 0) {
            throw SchemaError("unknown action '" + j.get<std::string>() + "' in " + where);
        }
        return idx;
    };
    auto reactionOf = [&](const nlohmann::json& j, const char* where) {
        if (!j.is_string()) {
            throw SchemaError(std::string("reaction in ") + where + " must be a string");
        }
        int idx = indexIn(reactionNames, j.get<std::string>());
        if (idx < 0) {
            throw SchemaError("unknown reaction '" + j.get<std::string>() + "' in " + where);
        }
        return idx;
    };
    auto arrayField = [&](const nlohmann::json& entry, const char* name, const char* where)
        -> const nlohmann::json& {
        const nlohmann::json& j = field(entry, name);
        if (!j.is_array()) {
            throw SchemaError(std::string(name) + " in " + where + " must be an array");
        }
        return j;
    };

    DomainBuilder b(fluents, actionNames, reactionNames);
    b.setInitial(stateOf(field(doc, "initial"), "initial"));

    const nlohmann::json& alpha = field(doc, "alpha");
    if (!alpha.is_array()) {
        throw SchemaError("alpha must be an array");
    }
    for (const auto& entry : alpha) {
        DomainState s = stateOf(field(entry, "state"), "alpha state");
        for (const nlohmann::json& a : arrayField(entry, "actions", "alpha")) {
            b.enable(s, actionOf(a, "alpha"));
        }
    }

    const nlohmann::json& beta = field(doc, "beta");
    if (!beta.is_array()) {
        throw SchemaError("beta must be an array");
    }
    for (const auto& entry : beta) {
        DomainState s = stateOf(field(entry, "state"), "beta state");
        int a = actionOf(field(entry, "action"), "beta");
        for (const nlohmann::json& r : arrayField(entry, "reactions", "beta")) {
            b.allow(s, a, reactionOf(r, "beta"));
        }
    }

    const nlohmann::json& delta = field(doc, "delta");
    if (!delta.is_array()) {
        throw SchemaError("delta must be an array");
    }
    for (const auto& entry : delta) {
        DomainState s = stateOf(field(entry, "state"), "delta state");
        int a = actionOf(field(entry, "action"), "delta");
        int r = reactionOf(field(entry, "reaction"), "delta");
        b.transition(s, a, r, stateOf(field(entry, "next"), "delta next"));
    }

    return b.build();
}

Domain loadDomainFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open domain file '" + path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("domain file '" + path + "' is not valid JSON: " + e.what());
    }
    return loadDomain(doc);
}

nlohmann::json ValidationReport::toJson(const Domain& d) const {
    nlohmann::json out;
    out["ok"] = ok();
    nlohmann::json vs = nlohmann::json::array();
    for (const DomainViolation& v : violations) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < d.fluents().size(); ++i) {
            if ((v.state >> i) & 1u) {
                names.push_back(d.fluents().name(i));
            }
        }
        vs.push_back({{"rule", v.rule}, {"state", names}, {"detail", v.detail}});
    }
    out["violations"] = std::move(vs);
    return out;
}

ValidationReport validateDomain(const Domain& d, ValidationScope scope) {
    std::vector<DomainState> states;
    if (scope == ValidationScope::Full) {
        if (d.fluents().size() > 20) {
            throw BudgetError("validateDomain: full scope over " +
                              std::to_string(d.fluents().size()) +
                              " fluents exceeds the 2^20 enumeration cap");
        }
        DomainState count = DomainState(1) << d.fluents().size();
        for (DomainState s = 0; s < count; ++s) {
            states.push_back(s);
        }
    } else {
        std::set<DomainState> seen{d.initial()};
        std::vector<DomainState> queue{d.initial()};
        while (!queue.empty()) {
            DomainState s = queue.back();
            queue.pop_back();
            states.push_back(s);
            for (int a : d.alpha(s)) {
                for (int r : d.beta(s, a)) {
                    if (auto next = d.delta(s, a, r); next && seen.insert(*next).second) {
                        queue.push_back(*next);
                    }
                }
            }
        }
        std::sort(states.begin(), states.end());
    }

    ValidationReport report;
    for (DomainState s : states) {
        std::vector<int> acts = d.alpha(s);
        if (acts.empty()) {
            report.violations.push_back(
                {"R1", s, "no agent action is enabled at state " + d.stateName(s)});
            continue;
        }
        for (int a : acts) {
            std::vector<int> reacts = d.beta(s, a);
            if (reacts.empty()) {
                report.violations.push_back(
                    {"R2", s, "no environment reaction to action '" + d.actions()[a] +
                                  "' at state " + d.stateName(s)});
                continue;
            }
            std::map<DomainState, int> successors;
            for (int r : reacts) {
                auto next = d.delta(s, a, r);
                if (!next) {
                    report.violations.push_back(
                        {"delta", s, "transition undefined for action '" + d.actions()[a] +
                                         "', reaction '" + d.reactions()[r] + "' at state " +
                                         d.stateName(s)});
                    continue;
                }
                auto [it, fresh] = successors.emplace(*next, r);
                if (!fresh) {
                    report.violations.push_back(
                        {"R3", s, "reactions '" + d.reactions()[it->second] + "' and '" +
                                      d.reactions()[r] + "' to action '" + d.actions()[a] +
                                      "' both lead to state " + d.stateName(*next)});
                }
            }
        }
    }
    return report;
}

CompletedState CompletedDomain::step(CompletedState t, int action, int reaction) const {
    if (t.part != Part::Normal) {
        return t; // both error states absorb every move
    }
    std::vector<int> acts = base_.alpha(t.state);
    if (std::find(acts.begin(), acts.end(), action) == acts.end()) {
        return {Part::AgentError, 0};
    }
    std::vector<int> reacts = base_.beta(t.state, action);
    if (std::find(reacts.begin(), reacts.end(), reaction) == reacts.end()) {
        return {Part::EnvError, 0};
    }
    auto next = base_.delta(t.state, action, reaction);
    if (!next) {
        throw std::logic_error("CompletedDomain::step: transition undefined for an "
                               "enabled action and legal reaction; the domain was not "
                               "validated");
    }
    return {Part::Normal, *next};
}

CompletedDomain completeDomain(const Domain& d) {
    CompletedDomain out;
    out.base_ = d;
    return out;
}

std::optional<DomainTrace> traceOf(const Domain& d, const std::vector<int>& actions,
                                   const std::vector<int>& reactions) {
    if (actions.size() != reactions.size()) {
        return std::nullopt;
    }
    DomainTrace t{d.initial()};
    for (std::size_t i = 0; i < actions.size(); ++i) {
        DomainState s = t.back();
        std::vector<int> acts = d.alpha(s);
        if (std::find(acts.begin(), acts.end(), actions[i]) == acts.end()) {
            return std::nullopt;
        }
        std::vector<int> reacts = d.beta(s, actions[i]);
        if (std::find(reacts.begin(), reacts.end(), reactions[i]) == reacts.end()) {
            return std::nullopt;
        }
        auto next = d.delta(s, actions[i], reactions[i]);
        if (!next) {
            return std::nullopt;
        }
        t.push_back(*next);
    }
    return t;
}

bool isLegalTrace(const Domain& d, const DomainTrace& t) {
    if (t.empty() || t.front() != d.initial()) {
        return false;
    }
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        bool witnessed = false;
        for (int a : d.alpha(t[i])) {
            for (int r : d.beta(t[i], a)) {
                if (auto next = d.delta(t[i], a, r); next && *next == t[i + 1]) {
                    witnessed = true;
                    break;
                }
            }
            if (witnessed) {
                break;
            }
        }
        if (!witnessed) {
            return false;
        }
    }
    return true;
}

Domain withNopRepair(const Domain& d) {
    if (d.actionIndex("nop") >= 0 || d.reactionIndex("nopr") >= 0) {
        throw std::invalid_argument(
            "withNopRepair: the domain already declares 'nop' or 'nopr'");
    }
    Domain out = d;
    out.actions_.push_back("nop");
    out.reactions_.push_back("nopr");
    out.nopRepair_ = true;
    return out;
}

} // namespace besynth
