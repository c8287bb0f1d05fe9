#include "besynth/cli.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "besynth/arena.hpp"
#include "besynth/bench.hpp"
#include "besynth/best_effort.hpp"
#include "besynth/dfa.hpp"
#include "besynth/domain.hpp"
#include "besynth/errors.hpp"
#include "besynth/ltlf.hpp"
#include "besynth/runtime.hpp"

namespace besynth {

namespace {

// Flag > BESYNTH_STATE_CAP env var > built-in default.
std::size_t resolveStateCap(std::size_t flagValue) {
    if (flagValue > 0) {
        return flagValue;
    }
    if (const char* env = std::getenv("BESYNTH_STATE_CAP")) {
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (errno != 0 || end == env || *end != '\0' || v == 0) {
            throw std::invalid_argument("BESYNTH_STATE_CAP must be a positive integer, got '" +
                                        std::string(env) + "'");
        }
        return static_cast<std::size_t>(v);
    }
    return 200000;
}

SynthesisOptions synthesisOptions(std::size_t cap) {
    SynthesisOptions options;
    options.compile.stateCap = cap;
    options.compose.stateCap = cap;
    return options;
}

int parseInt(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw std::invalid_argument(what + ": '" + text + "' is not an integer");
    }
    return value;
}

// "N" or "A..B".
std::pair<int, int> parseRange(const std::string& text, const std::string& what) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const int v = parseInt(text, what);
        return {v, v};
    }
    const int lo = parseInt(text.substr(0, dots), what);
    const int hi = parseInt(text.substr(dots + 2), what);
    return {lo, hi};
}

std::vector<std::string> splitCommaList(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void writeArtifact(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out.flush()) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

// Reaction scripts are whitespace-separated reaction names; bare indices are
// accepted too.
std::vector<int> loadReactionScript(const std::string& path, const Domain& d) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open reaction script '" + path + "'");
    }
    std::vector<int> script;
    std::string token;
    while (in >> token) {
        const bool numeric =
            std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); });
        int id = numeric ? parseInt(token, "reaction index") : d.reactionIndex(token);
        if (id < 0 || id >= static_cast<int>(d.reactions().size())) {
            throw std::invalid_argument("script entry '" + token + "' names no reaction of the domain");
        }
        script.push_back(id);
    }
    return script;
}

// nullptr result means "interactive": the caller should run a terminal session.
std::unique_ptr<EnvPolicy> makePolicy(const std::string& spec, const Domain& d) {
    if (spec == "interactive") {
        return nullptr;
    }
    if (spec == "adversarial") {
        return adversarialOraclePolicy();
    }
    if (spec.rfind("random:", 0) == 0) {
        const std::string seedText = spec.substr(7);
        char* end = nullptr;
        errno = 0;
        const unsigned long long seed = std::strtoull(seedText.c_str(), &end, 10);
        if (errno != 0 || end == seedText.c_str() || *end != '\0') {
            throw std::invalid_argument("random environment needs an integer seed, got '" +
                                        seedText + "'");
        }
        return randomPolicy(seed);
    }
    if (spec.rfind("scripted:", 0) == 0) {
        return scriptedPolicy(loadReactionScript(spec.substr(9), d));
    }
    throw std::invalid_argument(
        "--env must be scripted:<file>, random:<seed>, adversarial, or interactive");
}

struct CompileArgs {
    std::string formula;
    std::string fluents;
    std::string format = "dot";
    std::string out;
    bool noMinimize = false;
    std::size_t stateCap = 0;
};

int runCompile(const CompileArgs& args) {
    const FluentSet fluents(splitCommaList(args.fluents));
    auto mgr = FormulaManager::create();
    const Formula f = parse(mgr, args.formula, fluents);
    CompileOptions options;
    options.stateCap = resolveStateCap(args.stateCap);
    options.minimize = !args.noMinimize;
    const Dfa dfa = compile(mgr, f, fluents, options);
    if (args.format == "dot") {
        writeArtifact(args.out, dfa.toDot());
    } else if (args.format == "json") {
        writeArtifact(args.out, dfa.toJson().dump(2) + "\n");
    } else {
        throw std::invalid_argument("--format must be dot or json");
    }
    return 0;
}

struct CheckDomainArgs {
    std::string file;
    std::string scope = "reachable";
    bool addNop = false;
};

int runCheckDomain(const CheckDomainArgs& args) {
    Domain d = loadDomainFile(args.file);
    if (args.addNop) {
        d = withNopRepair(d);
    }
    ValidationScope scope;
    if (args.scope == "reachable") {
        scope = ValidationScope::Reachable;
    } else if (args.scope == "full") {
        scope = ValidationScope::Full;
    } else {
        throw std::invalid_argument("--scope must be reachable or full");
    }
    const ValidationReport report = validateDomain(d, scope);
    std::cout << report.toJson(d).dump(2) << '\n';
    return report.ok() ? 0 : 2;
}

struct SynthesizeArgs {
    std::string domain;
    std::string formula;
    std::string exportPath;
    std::size_t stateCap = 0;
};

int runSynthesize(const SynthesizeArgs& args) {
    const Domain d = loadDomainFile(args.domain);
    auto mgr = FormulaManager::create();
    const Formula goal = parse(mgr, args.formula, d.fluents());
    const BestEffortStrategy s =
        synthesize(d, goal, synthesisOptions(resolveStateCap(args.stateCap)));
    std::cout << "classification: " << to_string(s.classification()) << '\n';
    if (!args.exportPath.empty()) {
        writeArtifact(args.exportPath, exportStrategy(s).dump(2) + "\n");
    }
    return 0;
}

struct SimulateArgs {
    std::string domain;
    std::string formula;
    std::string env;
    int maxSteps = 0;
    bool continueAfterGoal = false;
    std::size_t stateCap = 0;
};

int runSimulate(const SimulateArgs& args) {
    const Domain d = loadDomainFile(args.domain);
    auto mgr = FormulaManager::create();
    const Formula goal = parse(mgr, args.formula, d.fluents());
    const BestEffortStrategy s =
        synthesize(d, goal, synthesisOptions(resolveStateCap(args.stateCap)));

    PlayOptions options;
    options.maxSteps = args.maxSteps;
    options.continueAfterGoal = args.continueAfterGoal;

    auto policy = makePolicy(args.env, d);
    const PlayRecord rec = policy ? play(s, *policy, options)
                                  : interactiveSession(s, std::cin, std::cout, options);
    std::cout << rec.toJson(d).dump(2) << '\n';
    return 0;
}

struct VerifyArgs {
    std::string domain;
    std::string formula;
    std::size_t stateCap = 0;
};

int runVerify(const VerifyArgs& args) {
    const Domain d = loadDomainFile(args.domain);
    auto mgr = FormulaManager::create();
    const Formula goal = parse(mgr, args.formula, d.fluents());
    const BestEffortStrategy s =
        synthesize(d, goal, synthesisOptions(resolveStateCap(args.stateCap)));
    const VerificationReport report = verifyMaximality(s);
    std::cout << report.toJson(s).dump(2) << '\n';
    return report.ok() ? 0 : 3;
}

struct BenchArgs {
    std::string objects = "1";
    std::string locations = "1";
    double timeout = 1200.0;
    std::string out;
    int reps = 1;
    int parallel = 1;
    std::size_t stateCap = 0;
};

int runBenchCmd(const BenchArgs& args) {
    BenchConfig cfg;
    std::tie(cfg.objectsFrom, cfg.objectsTo) = parseRange(args.objects, "--objects");
    std::tie(cfg.locationsFrom, cfg.locationsTo) = parseRange(args.locations, "--locations");
    cfg.timeoutSeconds = args.timeout;
    cfg.reps = args.reps;
    cfg.parallel = args.parallel;
    cfg.stateCap = resolveStateCap(args.stateCap);
    const BenchSummary summary = runBench(cfg, args.out);
    std::cout << summary.report();
    return 0;
}

template <typename Fn> int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << " (position " << e.position() << ")\n";
        return 1;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const TimeoutError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace

int cliMain(int argc, const char* const* argv) {
    CLI::App app{"best-effort strategy synthesis for LTLf goals in nondeterministic domains"};
    app.require_subcommand(1);

    CompileArgs compileArgs;
    CLI::App* compileCmd = app.add_subcommand("compile", "translate a formula to its DFA");
    compileCmd->add_option("formula", compileArgs.formula, "LTLf formula text")->required();
    compileCmd->add_option("--fluents", compileArgs.fluents, "comma-separated fluent names")
        ->required();
    compileCmd->add_option("--format", compileArgs.format, "dot|json (default dot)");
    compileCmd->add_option("--out", compileArgs.out, "output file (default stdout)");
    compileCmd->add_flag("--no-minimize", compileArgs.noMinimize, "skip DFA minimization");
    compileCmd->add_option("--state-cap", compileArgs.stateCap, "construction state budget");

    CheckDomainArgs checkArgs;
    CLI::App* checkCmd = app.add_subcommand("check-domain", "validate the domain rules");
    checkCmd->add_option("file", checkArgs.file, "domain JSON file")->required();
    checkCmd->add_option("--scope", checkArgs.scope, "reachable|full (default reachable)");
    checkCmd->add_flag("--add-nop", checkArgs.addNop, "apply the no-op repair before checking");

    SynthesizeArgs synthArgs;
    CLI::App* synthCmd = app.add_subcommand("synthesize", "build the best-effort strategy");
    synthCmd->add_option("domain", synthArgs.domain, "domain JSON file")->required();
    synthCmd->add_option("formula", synthArgs.formula, "LTLf goal")->required();
    synthCmd->add_option("--export", synthArgs.exportPath, "write the strategy as JSON");
    synthCmd->add_option("--state-cap", synthArgs.stateCap, "construction state budget");

    SimulateArgs simArgs;
    CLI::App* simCmd = app.add_subcommand("simulate", "play the strategy against an environment");
    simCmd->add_option("domain", simArgs.domain, "domain JSON file")->required();
    simCmd->add_option("formula", simArgs.formula, "LTLf goal")->required();
    simCmd->add_option("--env", simArgs.env,
                       "scripted:<file> | random:<seed> | adversarial | interactive")
        ->required();
    simCmd->add_option("--max-steps", simArgs.maxSteps,
                       "step limit (default: 10x the arena size)");
    simCmd->add_flag("--continue", simArgs.continueAfterGoal, "keep playing after the goal");
    simCmd->add_option("--state-cap", simArgs.stateCap, "construction state budget");

    VerifyArgs verifyArgs;
    CLI::App* verifyCmd =
        app.add_subcommand("verify", "synthesize, then check the strategy is best-effort");
    verifyCmd->add_option("domain", verifyArgs.domain, "domain JSON file")->required();
    verifyCmd->add_option("formula", verifyArgs.formula, "LTLf goal")->required();
    verifyCmd->add_option("--state-cap", verifyArgs.stateCap, "construction state budget");

    BenchArgs benchArgs;
    CLI::App* benchCmd = app.add_subcommand("bench", "time the objects-at-locations family");
    benchCmd->add_option("--objects", benchArgs.objects, "object count or range A..B");
    benchCmd->add_option("--locations", benchArgs.locations, "location count or range A..B");
    benchCmd->add_option("--timeout", benchArgs.timeout, "per-instance budget in seconds");
    benchCmd->add_option("--out", benchArgs.out, "CSV output file");
    benchCmd->add_option("--reps", benchArgs.reps, "repetitions per instance (median kept)");
    benchCmd->add_option("--parallel", benchArgs.parallel, "instances run concurrently");
    benchCmd->add_option("--state-cap", benchArgs.stateCap, "construction state budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    return guarded([&]() -> int {
        if (compileCmd->parsed()) {
            return runCompile(compileArgs);
        }
        if (checkCmd->parsed()) {
            return runCheckDomain(checkArgs);
        }
        if (synthCmd->parsed()) {
            return runSynthesize(synthArgs);
        }
        if (simCmd->parsed()) {
            return runSimulate(simArgs);
        }
        if (verifyCmd->parsed()) {
            return runVerify(verifyArgs);
        }
        return runBenchCmd(benchArgs);
    });
}

} // namespace besynth
