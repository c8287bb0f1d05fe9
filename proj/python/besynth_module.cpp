// Python face of the library: domain validation, DFA compilation, synthesis,
// verification, and plays, all speaking plain dicts/lists (JSON values).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "besynth/bench.hpp"
#include "besynth/best_effort.hpp"
#include "besynth/dfa.hpp"
#include "besynth/domain.hpp"
#include "besynth/errors.hpp"
#include "besynth/ltlf.hpp"
#include "besynth/runtime.hpp"

namespace py = pybind11;
using namespace besynth;

namespace {

// Dicts/lists cross the boundary as JSON text; a str argument is taken to be
// JSON already.
nlohmann::json fromPy(const py::object& obj) {
    if (py::isinstance<py::str>(obj)) {
        return nlohmann::json::parse(obj.cast<std::string>());
    }
    const std::string dumped = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return nlohmann::json::parse(dumped);
}

py::object toPy(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(py::str(j.dump()));
}

ValidationScope scopeOf(const std::string& name) {
    if (name == "reachable") {
        return ValidationScope::Reachable;
    }
    if (name == "full") {
        return ValidationScope::Full;
    }
    throw std::invalid_argument("scope must be 'reachable' or 'full'");
}

// One synthesis run. The formula manager, domain, and strategy live and die
// together, so nothing handed to Python dangles.
class Synthesis {
public:
    Synthesis(const py::object& domain, const std::string& goal, std::size_t stateCap)
        : mgr_(FormulaManager::create()), domain_(loadDomain(fromPy(domain))) {
        SynthesisOptions options;
        options.compile.stateCap = stateCap;
        options.compose.stateCap = stateCap;
        strategy_.emplace(synthesize(domain_, parse(mgr_, goal, domain_.fluents()), options));
    }

    std::string classification() const { return to_string(strategy_->classification()); }
    std::size_t dfaStates() const { return strategy_->arena().dfa().numStates(); }
    std::size_t arenaStates() const { return strategy_->arena().numStates(); }

    py::object exportStrategyJson() const { return toPy(exportStrategy(*strategy_)); }
    py::object verify() const { return toPy(verifyMaximality(*strategy_).toJson(*strategy_)); }

    // history: one fluent-name list per visited state, oldest first.
    std::string act(const std::vector<std::vector<std::string>>& history) const {
        DomainTrace trace;
        for (const auto& names : history) {
            trace.push_back(domain_.stateOf(names));
        }
        return domain_.actions().at(besynth::act(*strategy_, trace));
    }

    py::object playScripted(const std::vector<std::string>& reactions, int maxSteps,
                            bool continueAfterGoal) const {
        std::vector<int> ids;
        for (const auto& name : reactions) {
            const int id = domain_.reactionIndex(name);
            if (id < 0) {
                throw std::invalid_argument("unknown reaction '" + name + "'");
            }
            ids.push_back(id);
        }
        auto policy = scriptedPolicy(ids);
        return runPlay(*policy, maxSteps, continueAfterGoal);
    }

    py::object playRandom(std::uint64_t seed, int maxSteps, bool continueAfterGoal) const {
        auto policy = randomPolicy(seed);
        return runPlay(*policy, maxSteps, continueAfterGoal);
    }

    py::object playAdversarial(int maxSteps, bool continueAfterGoal) const {
        auto policy = adversarialOraclePolicy();
        return runPlay(*policy, maxSteps, continueAfterGoal);
    }

private:
    py::object runPlay(EnvPolicy& env, int maxSteps, bool continueAfterGoal) const {
        PlayOptions options;
        options.maxSteps = maxSteps;
        options.continueAfterGoal = continueAfterGoal;
        return toPy(play(*strategy_, env, options).toJson(domain_));
    }

    std::shared_ptr<FormulaManager> mgr_;
    Domain domain_;
    std::optional<BestEffortStrategy> strategy_;
};

} // namespace

PYBIND11_MODULE(besynth, m) {
    m.doc() = "best-effort strategy synthesis for LTLf goals in nondeterministic domains";

    py::register_exception<ParseError>(m, "FormulaError", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "DomainRulesError", PyExc_ValueError);
    py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
    py::register_exception<TimeoutError>(m, "DeadlineError", PyExc_RuntimeError);

    m.def(
        "compile_dfa",
        [](const std::string& formula, const std::vector<std::string>& fluents, bool minimize,
           std::size_t stateCap) {
            auto mgr = FormulaManager::create();
            const FluentSet fl(fluents);
            CompileOptions options;
            options.minimize = minimize;
            options.stateCap = stateCap;
            return toPy(compile(mgr, parse(mgr, formula, fl), fl, options).toJson());
        },
        py::arg("formula"), py::arg("fluents"), py::arg("minimize") = true,
        py::arg("state_cap") = 200000,
        "Translate an LTLf formula over the given fluents to its DFA, as a dict.");

    m.def(
        "validate_domain",
        [](const py::object& domain, const std::string& scope, bool addNop) {
            Domain d = loadDomain(fromPy(domain));
            if (addNop) {
                d = withNopRepair(d);
            }
            return toPy(validateDomain(d, scopeOf(scope)).toJson(d));
        },
        py::arg("domain"), py::arg("scope") = "reachable", py::arg("add_nop") = false,
        "Check the domain rules; returns {'ok': bool, 'violations': [...]}.");

    m.def(
        "arch_benchmark",
        [](int objects, int locations) {
            auto mgr = FormulaManager::create();
            const auto [d, goal] = genArchBenchmark(mgr, objects, locations);
            return py::make_tuple(toPy(d.toJson()), to_string(goal));
        },
        py::arg("objects"), py::arg("locations"),
        "Generate an objects-at-locations instance; returns (domain, goal).");

    py::class_<Synthesis>(m, "Synthesis",
                          "Synthesize the best-effort strategy for a goal in a domain.")
        .def(py::init<const py::object&, const std::string&, std::size_t>(), py::arg("domain"),
             py::arg("goal"), py::arg("state_cap") = 200000)
        .def_property_readonly("classification", &Synthesis::classification,
                               "winning | pending | losing")
        .def_property_readonly("dfa_states", &Synthesis::dfaStates)
        .def_property_readonly("arena_states", &Synthesis::arenaStates)
        .def("export_strategy", &Synthesis::exportStrategyJson,
             "The full strategy table as a dict.")
        .def("verify", &Synthesis::verify,
             "Independent maximality check; returns {'ok': bool, 'violations': [...]}.")
        .def("act", &Synthesis::act, py::arg("history"),
             "The action the strategy picks after the given state history "
             "(fluent-name lists, oldest first).")
        .def("play_scripted", &Synthesis::playScripted, py::arg("reactions"),
             py::arg("max_steps") = 0, py::arg("continue_after_goal") = false,
             "Play against a fixed reaction-name script; returns the play record.")
        .def("play_random", &Synthesis::playRandom, py::arg("seed") = 0,
             py::arg("max_steps") = 0, py::arg("continue_after_goal") = false,
             "Play against uniformly random legal reactions.")
        .def("play_adversarial", &Synthesis::playAdversarial, py::arg("max_steps") = 0,
             py::arg("continue_after_goal") = false,
             "Play against the built-in spoiler environment.");
}
