#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainbound/coarsening.hpp"
#include "chainbound/sampling.hpp"

namespace chainbound {

// One rung of the bounding schedule: how many edges each restriction keeps,
// how many partitions the relaxation aggregates to, and how many times each
// side is repeated for statistics.
struct LevelSpec {
    int edges = 0;
    int partitions = 0;
    int draws = 1;
};

struct LevelOutcome {
    LevelSpec spec;  // after clamping to the instance dimensions
    LowerBoundRun lower;
    UpperBoundRun upper;
    double lb_wall_seconds = 0.0;
    double ub_wall_seconds = 0.0;
    // running envelopes after this level; monotone by construction
    double best_lb = 0.0;
    double best_ub = 0.0;
    double gap_percent = 0.0;
};

struct GscOptions {
    std::uint64_t seed = 0;
    double gap_tol_percent = 0.0;  // 0 runs the whole schedule
    bool stratified = false;       // per-product stratified edge draws
};

struct BoundReport {
    std::vector<LevelOutcome> levels;
    double best_lb = 0.0;
    double best_ub = 0.0;
    double gap_percent = 0.0;
    Allocation best_allocation;  // the restriction solution behind best_lb
    int best_allocation_level = -1;
    bool stopped_early = false;
    double total_lb_seconds = 0.0;
    double total_ub_seconds = 0.0;
    // provenance, echoed into serialized reports
    std::uint64_t seed = 0;
    double gap_tol_percent = 0.0;
    bool stratified = false;
    SolverParams params;
};

// Optimality gap as a percentage of the bound magnitude. Requires ub to not
// sit below lb (beyond tolerance); ub = 0 only pairs with lb = 0, where the
// gap is defined as zero.
double gap_percent(double lb, double ub);

// Three-significant-digit rendering used in reports (e.g. 0.5697 -> "0.57",
// 40.675 -> "40.7").
std::string format_gap(double percent);

// Runs the schedule in order. Level i derives its seeds from the master
// seed with a fixed stride, so extending the schedule never changes the
// results of earlier levels. Stops early once the envelope gap reaches
// gap_tol_percent (when positive).
BoundReport run_gsc(const SupplyChainInstance& inst, const std::vector<LevelSpec>& levels,
                    const SolverParams& params, const GscOptions& options = {},
                    const BackendFactory& factory = nullptr);

}  // namespace chainbound
