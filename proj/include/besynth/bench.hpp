#pragma once

#include <string>
#include <utility>
#include <vector>

#include "besynth/best_effort.hpp"
#include "besynth/domain.hpp"
#include "besynth/ltlf.hpp"

namespace besynth {

// The objects-at-locations family: O objects start in storage, the agent
// may hold one at a time and place it at a free location, and after every
// agent move the environment may put one placed object back into storage
// (or do nothing). The goal asks for object o at location o, so instances
// need O <= L. The environment's undo at the final placement kills every
// strong solution, while the all-"none" environment lets the goal through:
// generated instances always classify pending.
//
// Explicit-state caps: O <= 3, L <= 12 (BudgetError above). O > L raises
// invalid_argument (the goal would mention a location that does not exist).
std::pair<Domain, Formula> genArchBenchmark(const std::shared_ptr<FormulaManager>& mgr, int objects,
                                            int locations);

enum class BenchMode { BestEffort, AdversarialOnly, CooperativeOnly };
std::string to_string(BenchMode m);

struct BenchConfig {
    int objectsFrom = 1;
    int objectsTo = 1;
    int locationsFrom = 1;
    int locationsTo = 1;
    std::vector<BenchMode> modes{BenchMode::BestEffort, BenchMode::AdversarialOnly,
                                 BenchMode::CooperativeOnly};
    double timeoutSeconds = 1200.0;
    // Repetitions per row; the row with the median total time is reported.
    int reps = 1;
    // Rows run sequentially by default for clean timings; higher values run
    // that many instances concurrently (each pipeline stays single-threaded).
    int parallel = 1;
    std::size_t stateCap = 200000;
};

struct BenchRow {
    int objects = 0;
    int locations = 0;
    BenchMode mode = BenchMode::BestEffort;
    int dfaStates = 0;
    int arenaStates = 0;
    StepTimings timings;
    // bestEffort: winning|pending|losing. adversarialOnly only knows whether
    // the goal is forcible: winning|not-winning. cooperativeOnly only knows
    // whether it is reachable at all: cooperative|not-cooperative. Empty on
    // non-ok rows.
    std::string classification;
    std::string outcome; // ok | timeout | budget
};

struct BenchSummary {
    std::vector<BenchRow> rows;

    // Total t_total_ms over ok rows of the mode.
    double totalMs(BenchMode m) const;
    // Ratio of per-mode totals restricted to (O, L) pairs where both modes
    // are ok; 0 when no pair qualifies.
    double ratio(BenchMode numerator, BenchMode denominator) const;
    // Human-readable per-mode totals and the bestEffort/cooperativeOnly and
    // adversarialOnly/bestEffort ratios.
    std::string report() const;
};

// One row per (O, L, mode) over the configured ranges, written to csvPath
// (empty path = don't write) with the fixed header
//   O,L,mode,dfa_states,arena_states,t_dfa_ms,t_arena_ms,t_adv_ms,
//   t_coop_ms,t_combine_ms,t_total_ms,classification,outcome
// Timeouts and budget overruns become row outcomes; the run continues.
BenchSummary runBench(const BenchConfig& config, const std::string& csvPath);

// The CSV rendering used by runBench, exposed for testing.
std::string toCsv(const std::vector<BenchRow>& rows);

} // namespace besynth
