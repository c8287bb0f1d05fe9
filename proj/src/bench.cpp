#include "besynth/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "besynth/arena.hpp"
#include "besynth/dfa.hpp"
#include "besynth/errors.hpp"
#include "besynth/game.hpp"

namespace besynth {

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void throwIfExpired(const std::optional<Clock::time_point>& deadline) {
    if (deadline && Clock::now() >= *deadline) {
        throw TimeoutError("bench: instance exceeded its time budget");
    }
}

} // namespace

std::pair<Domain, Formula> genArchBenchmark(const std::shared_ptr<FormulaManager>& mgr, int objects,
                                            int locations) {
    if (!mgr) {
        throw std::invalid_argument("genArchBenchmark: formula manager is null");
    }
    if (objects < 1 || locations < 1) {
        throw std::invalid_argument("genArchBenchmark: need at least one object and one location");
    }
    if (objects > locations) {
        throw std::invalid_argument(
            "genArchBenchmark: the goal places object o at location o, so objects must not "
            "exceed locations");
    }
    if (objects > 3 || locations > 12) {
        throw BudgetError("genArchBenchmark: cap exceeded, explicit-state instances stop at 3 "
                          "objects and 12 locations");
    }

    const int O = objects;
    const int L = locations;

    // Bit layout: at_o_l first (o-major), then held_o, then stored_o.
    const auto atBit = [L](int o, int l) { return o * L + l; };
    const auto heldBit = [O, L](int o) { return O * L + o; };
    const auto storedBit = [O, L](int o) { return O * L + O + o; };

    std::vector<std::string> fluentNames;
    for (int o = 0; o < O; ++o) {
        for (int l = 0; l < L; ++l) {
            fluentNames.push_back("at_" + std::to_string(o) + "_" + std::to_string(l));
        }
    }
    for (int o = 0; o < O; ++o) {
        fluentNames.push_back("held_" + std::to_string(o));
    }
    for (int o = 0; o < O; ++o) {
        fluentNames.push_back("stored_" + std::to_string(o));
    }

    // Actions: pick_o, then place_o_l (o-major), then nop.
    std::vector<std::string> actionNames;
    for (int o = 0; o < O; ++o) {
        actionNames.push_back("pick_" + std::to_string(o));
    }
    for (int o = 0; o < O; ++o) {
        for (int l = 0; l < L; ++l) {
            actionNames.push_back("place_" + std::to_string(o) + "_" + std::to_string(l));
        }
    }
    actionNames.push_back("nop");
    const auto pickAction = [](int o) { return o; };
    const auto placeAction = [O, L](int o, int l) { return O + o * L + l; };
    const int nopAction = O + O * L;

    // Reactions: none, then undo_o_l (o-major).
    std::vector<std::string> reactionNames;
    reactionNames.push_back("none");
    for (int o = 0; o < O; ++o) {
        for (int l = 0; l < L; ++l) {
            reactionNames.push_back("undo_" + std::to_string(o) + "_" + std::to_string(l));
        }
    }
    const auto undoReaction = [L](int o, int l) { return 1 + o * L + l; };

    const auto bit = [](int i) { return DomainState{1} << i; };

    DomainState initial = 0;
    for (int o = 0; o < O; ++o) {
        initial |= bit(storedBit(o));
    }

    const auto enabledActions = [&](DomainState s) {
        std::vector<int> out;
        bool holding = false;
        for (int o = 0; o < O && !holding; ++o) {
            holding = (s & bit(heldBit(o))) != 0;
        }
        for (int o = 0; o < O; ++o) {
            if (!holding && (s & bit(storedBit(o)))) {
                out.push_back(pickAction(o));
            }
        }
        for (int o = 0; o < O; ++o) {
            if (!(s & bit(heldBit(o)))) {
                continue;
            }
            for (int l = 0; l < L; ++l) {
                bool occupied = false;
                for (int other = 0; other < O && !occupied; ++other) {
                    occupied = (s & bit(atBit(other, l))) != 0;
                }
                if (!occupied) {
                    out.push_back(placeAction(o, l));
                }
            }
        }
        out.push_back(nopAction);
        return out;
    };

    // The agent's move before environment interference.
    const auto applyAction = [&](DomainState s, int action) {
        if (action < O) {
            return (s & ~bit(storedBit(action))) | bit(heldBit(action));
        }
        if (action < nopAction) {
            const int o = (action - O) / L;
            const int l = (action - O) % L;
            return (s & ~bit(heldBit(o))) | bit(atBit(o, l));
        }
        return s;
    };

    DomainBuilder builder(FluentSet(fluentNames), actionNames, reactionNames);
    builder.setInitial(initial);

    std::vector<DomainState> queue{initial};
    std::map<DomainState, char> seen{{initial, 1}};
    while (!queue.empty()) {
        const DomainState s = queue.back();
        queue.pop_back();
        for (int action : enabledActions(s)) {
            builder.enable(s, action);
            const DomainState moved = applyAction(s, action);
            std::vector<std::pair<int, DomainState>> replies{{0, moved}};
            for (int o = 0; o < O; ++o) {
                for (int l = 0; l < L; ++l) {
                    if (moved & bit(atBit(o, l))) {
                        replies.emplace_back(undoReaction(o, l),
                                             (moved & ~bit(atBit(o, l))) | bit(storedBit(o)));
                    }
                }
            }
            for (const auto& [reaction, next] : replies) {
                builder.allow(s, action, reaction);
                builder.transition(s, action, reaction, next);
                if (seen.emplace(next, 1).second) {
                    queue.push_back(next);
                }
            }
        }
    }

    Formula goal = mgr->atom(fluentNames[atBit(0, 0)], atBit(0, 0));
    for (int o = 1; o < O; ++o) {
        goal = mgr->andF(goal, mgr->atom(fluentNames[atBit(o, o)], atBit(o, o)));
    }
    return {builder.build(), mgr->eventually(goal)};
}

std::string to_string(BenchMode m) {
    switch (m) {
    case BenchMode::BestEffort:
        return "bestEffort";
    case BenchMode::AdversarialOnly:
        return "adversarialOnly";
    case BenchMode::CooperativeOnly:
        return "cooperativeOnly";
    }
    return "?";
}

namespace {

BenchRow runInstance(int objects, int locations, BenchMode mode, const BenchConfig& config) {
    BenchRow row;
    row.objects = objects;
    row.locations = locations;
    row.mode = mode;

    const auto start = Clock::now();
    std::optional<Clock::time_point> deadline;
    if (config.timeoutSeconds > 0) {
        deadline = start + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(config.timeoutSeconds));
    }

    try {
        auto mgr = FormulaManager::create();
        auto [domain, goal] = genArchBenchmark(mgr, objects, locations);
        throwIfExpired(deadline);

        if (mode == BenchMode::BestEffort) {
            SynthesisOptions options;
            options.compile.stateCap = config.stateCap;
            options.compile.deadline = deadline;
            options.compose.stateCap = config.stateCap;
            options.compose.deadline = deadline;
            const BestEffortStrategy s = synthesize(domain, goal, options);
            row.timings = s.timings();
            row.dfaStates = static_cast<int>(s.arena().dfa().numStates());
            row.arenaStates = static_cast<int>(s.arena().numStates());
            row.classification = to_string(s.classification());
        } else {
            CompileOptions copt;
            copt.stateCap = config.stateCap;
            copt.deadline = deadline;
            auto t = Clock::now();
            const Dfa dfa = compile(mgr, goal, domain.fluents(), copt);
            row.timings.dfaMs = msSince(t);

            ComposeOptions aopt;
            aopt.stateCap = config.stateCap;
            aopt.deadline = deadline;
            t = Clock::now();
            const Arena arena = compose(completeDomain(domain), dfa, aopt);
            row.timings.arenaMs = msSince(t);
            row.dfaStates = static_cast<int>(dfa.numStates());
            row.arenaStates = static_cast<int>(arena.numStates());
            throwIfExpired(deadline);

            t = Clock::now();
            if (mode == BenchMode::AdversarialOnly) {
                const GameResult adv = solveAdversarialReach(arena, adversarialTarget(arena));
                row.timings.advMs = msSince(t);
                row.classification = adv.region[arena.initial()] ? "winning" : "not-winning";
            } else {
                const GameResult coop = solveCooperativeReach(arena, cooperativeTarget(arena));
                row.timings.coopMs = msSince(t);
                row.classification =
                    coop.region[arena.initial()] ? "cooperative" : "not-cooperative";
            }
            throwIfExpired(deadline);
            // Sum of pipeline stages, so partial-mode totals compare cleanly
            // against the full pipeline's own total.
            row.timings.totalMs = row.timings.dfaMs + row.timings.arenaMs + row.timings.advMs +
                                  row.timings.coopMs;
        }
        row.outcome = "ok";
    } catch (const TimeoutError&) {
        row.outcome = "timeout";
        row.classification.clear();
        row.timings.totalMs = msSince(start);
    } catch (const BudgetError&) {
        row.outcome = "budget";
        row.classification.clear();
        row.timings.totalMs = msSince(start);
    }
    return row;
}

// Repeats the instance and keeps the repetition with the median total time,
// so every reported row is one real, internally consistent run.
BenchRow runRow(int objects, int locations, BenchMode mode, const BenchConfig& config) {
    std::vector<BenchRow> reps;
    for (int i = 0; i < config.reps; ++i) {
        reps.push_back(runInstance(objects, locations, mode, config));
    }
    std::sort(reps.begin(), reps.end(), [](const BenchRow& a, const BenchRow& b) {
        return a.timings.totalMs < b.timings.totalMs;
    });
    return reps[(reps.size() - 1) / 2];
}

std::string formatMs(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

} // namespace

std::string toCsv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "O,L,mode,dfa_states,arena_states,t_dfa_ms,t_arena_ms,t_adv_ms,t_coop_ms,"
          "t_combine_ms,t_total_ms,classification,outcome\n";
    for (const BenchRow& r : rows) {
        os << r.objects << ',' << r.locations << ',' << to_string(r.mode) << ',' << r.dfaStates
           << ',' << r.arenaStates << ',' << formatMs(r.timings.dfaMs) << ','
           << formatMs(r.timings.arenaMs) << ',' << formatMs(r.timings.advMs) << ','
           << formatMs(r.timings.coopMs) << ',' << formatMs(r.timings.combineMs) << ','
           << formatMs(r.timings.totalMs) << ',' << r.classification << ',' << r.outcome << '\n';
    }
    return os.str();
}

double BenchSummary::totalMs(BenchMode m) const {
    double total = 0;
    for (const BenchRow& r : rows) {
        if (r.mode == m && r.outcome == "ok") {
            total += r.timings.totalMs;
        }
    }
    return total;
}

double BenchSummary::ratio(BenchMode numerator, BenchMode denominator) const {
    std::map<std::pair<int, int>, double> num, den;
    for (const BenchRow& r : rows) {
        if (r.outcome != "ok") {
            continue;
        }
        if (r.mode == numerator) {
            num[{r.objects, r.locations}] = r.timings.totalMs;
        }
        if (r.mode == denominator) {
            den[{r.objects, r.locations}] = r.timings.totalMs;
        }
    }
    double top = 0, bottom = 0;
    for (const auto& [key, value] : num) {
        const auto it = den.find(key);
        if (it != den.end()) {
            top += value;
            bottom += it->second;
        }
    }
    return bottom > 0 ? top / bottom : 0.0;
}

std::string BenchSummary::report() const {
    int ok = 0, timeout = 0, budget = 0;
    for (const BenchRow& r : rows) {
        if (r.outcome == "ok") {
            ++ok;
        } else if (r.outcome == "timeout") {
            ++timeout;
        } else {
            ++budget;
        }
    }
    std::ostringstream os;
    os << "rows: " << rows.size() << " (ok " << ok << ", timeout " << timeout << ", budget "
       << budget << ")\n";
    for (BenchMode m :
         {BenchMode::BestEffort, BenchMode::AdversarialOnly, BenchMode::CooperativeOnly}) {
        int count = 0;
        for (const BenchRow& r : rows) {
            count += (r.mode == m && r.outcome == "ok") ? 1 : 0;
        }
        os << "  " << std::left << std::setw(16) << to_string(m) << " total "
           << formatMs(totalMs(m)) << " ms over " << count << " ok rows\n";
    }
    const double beOverCoop = ratio(BenchMode::BestEffort, BenchMode::CooperativeOnly);
    const double advOverBe = ratio(BenchMode::AdversarialOnly, BenchMode::BestEffort);
    os << "  bestEffort/cooperativeOnly time ratio: " << formatMs(beOverCoop) << "\n";
    os << "  adversarialOnly/bestEffort time ratio: " << formatMs(advOverBe) << "\n";
    return os.str();
}

BenchSummary runBench(const BenchConfig& config, const std::string& csvPath) {
    if (config.objectsFrom < 1 || config.objectsFrom > config.objectsTo ||
        config.locationsFrom < 1 || config.locationsFrom > config.locationsTo) {
        throw std::invalid_argument("runBench: object/location ranges must be nonempty and "
                                    "start at 1 or above");
    }
    if (config.modes.empty()) {
        throw std::invalid_argument("runBench: no modes selected");
    }
    if (config.reps < 1) {
        throw std::invalid_argument("runBench: reps must be at least 1");
    }
    if (config.parallel < 1) {
        throw std::invalid_argument("runBench: parallel must be at least 1");
    }

    struct Task {
        int objects, locations;
        BenchMode mode;
    };
    std::vector<Task> tasks;
    for (int o = config.objectsFrom; o <= config.objectsTo; ++o) {
        for (int l = config.locationsFrom; l <= config.locationsTo; ++l) {
            if (o > l) {
                continue; // no instance: the goal needs location o for object o
            }
            for (BenchMode m : config.modes) {
                tasks.push_back({o, l, m});
            }
        }
    }

    BenchSummary summary;
    summary.rows.resize(tasks.size());
    if (config.parallel == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            summary.rows[i] =
                runRow(tasks[i].objects, tasks[i].locations, tasks[i].mode, config);
        }
    } else {
        std::atomic<std::size_t> next{0};
        const int workers = std::min<int>(config.parallel, static_cast<int>(tasks.size()));
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tasks.size();
                     i = next.fetch_add(1)) {
                    summary.rows[i] =
                        runRow(tasks[i].objects, tasks[i].locations, tasks[i].mode, config);
                }
            });
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    if (!csvPath.empty()) {
        std::ofstream out(csvPath);
        if (!out) {
            throw std::runtime_error("runBench: cannot open '" + csvPath + "' for writing");
        }
        out << toCsv(summary.rows);
        if (!out.flush()) {
            throw std::runtime_error("runBench: failed writing '" + csvPath + "'");
        }
    }
    return summary;
}

} // namespace besynth
