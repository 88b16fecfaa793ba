#include "chainbound/gsc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace chainbound {
namespace {

// Seed layout: each level owns a disjoint block, with the relaxation side
// offset into the block's second half so the two phases never share streams.
constexpr std::uint64_t kLevelStride = 1000000;
constexpr std::uint64_t kUpperOffset = 500000;

}  // namespace

double gap_percent(double lb, double ub) {
    if (ub == 0.0) {
        if (lb == 0.0) return 0.0;
        throw std::invalid_argument("gap undefined: upper bound is zero with nonzero lower bound");
    }
    if (ub < lb - 1e-6 * (1.0 + std::abs(ub)))
        throw std::invalid_argument("gap undefined: upper bound lies below lower bound");
    return 100.0 * (ub - lb) / std::abs(ub);
}

std::string format_gap(double percent) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", percent);
    return buf;
}

BoundReport run_gsc(const SupplyChainInstance& inst, const std::vector<LevelSpec>& levels,
                    const SolverParams& params, const GscOptions& options,
                    const BackendFactory& factory) {
    if (levels.empty()) throw std::invalid_argument("run_gsc: empty level schedule");
    for (const LevelSpec& lv : levels) {
        if (lv.edges < 1) throw std::invalid_argument("run_gsc: level edge count must be positive");
        if (lv.partitions < 1)
            throw std::invalid_argument("run_gsc: level partition count must be positive");
        if (lv.draws < 1) throw std::invalid_argument("run_gsc: level draw count must be positive");
    }

    BoundReport report;
    report.seed = options.seed;
    report.gap_tol_percent = options.gap_tol_percent;
    report.stratified = options.stratified;
    report.params = params;
    report.best_lb = -std::numeric_limits<double>::infinity();
    report.best_ub = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < levels.size(); ++i) {
        LevelOutcome outcome;
        outcome.spec.edges = std::min(levels[i].edges, inst.num_edges());
        outcome.spec.partitions = std::min(levels[i].partitions, inst.num_nodes());
        outcome.spec.draws = levels[i].draws;

        const std::uint64_t level_base = options.seed + kLevelStride * (i + 1);

        auto t0 = std::chrono::steady_clock::now();
        outcome.lower = lower_bound_run(inst, outcome.spec.edges, outcome.spec.draws, level_base,
                                        params, options.stratified, factory);
        outcome.lb_wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        t0 = std::chrono::steady_clock::now();
        outcome.upper = upper_bound_run(inst, outcome.spec.partitions, outcome.spec.draws,
                                        level_base + kUpperOffset, params, factory);
        outcome.ub_wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (outcome.lower.best_welfare > report.best_lb) {
            report.best_lb = outcome.lower.best_welfare;
            report.best_allocation = outcome.lower.best_allocation;
            report.best_allocation_level = static_cast<int>(i);
        }
        report.best_ub = std::min(report.best_ub, outcome.upper.best_bound);

        outcome.best_lb = report.best_lb;
        outcome.best_ub = report.best_ub;
        outcome.gap_percent = gap_percent(report.best_lb, report.best_ub);
        report.total_lb_seconds += outcome.lb_wall_seconds;
        report.total_ub_seconds += outcome.ub_wall_seconds;
        report.levels.push_back(std::move(outcome));

        if (options.gap_tol_percent > 0.0 &&
            report.levels.back().gap_percent <= options.gap_tol_percent) {
            report.stopped_early = i + 1 < levels.size();
            break;
        }
    }

    report.gap_percent = report.levels.back().gap_percent;
    return report;
}

}  // namespace chainbound
