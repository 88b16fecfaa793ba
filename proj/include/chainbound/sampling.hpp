#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "chainbound/milp.hpp"
#include "chainbound/rng.hpp"
#include "chainbound/stats.hpp"

namespace chainbound {

// Draws `count` transport edges without replacement. In stratified mode the
// draw is split into near-equal per-product quotas (capped by what each
// product actually has, surplus reassigned), which guards against products
// vanishing from sparse samples; the default is a plain uniform draw.
std::vector<int> sample_edges(const SupplyChainInstance& inst, int count, Rng& rng,
                              bool stratified = false);

// Restriction of the full model to the sampled edges. Any feasible point of
// this model is feasible for the full one, so its optimum is a certified
// lower bound on the full optimum.
MilpProblem formulate_sampled(const SupplyChainInstance& inst, const std::vector<int>& edges);

struct DrawResult {
    int draw = 0;               // position within the batch
    std::uint64_t seed = 0;     // seed that produced the edge set
    bool solved = false;
    std::string failure;        // populated when solved is false
    double welfare = 0.0;
    std::vector<int> edges;     // sampled edge ids, ascending
    double wall_seconds = 0.0;
};

struct LowerBoundRun {
    int sample_size = 0;        // edges per draw after clamping to |edges|
    int draws = 0;
    bool stratified = false;
    std::vector<DrawResult> results;
    SampleStats welfare_stats;  // over the solved draws
    double best_welfare = 0.0;
    int best_draw = -1;
    Allocation best_allocation;
};

using BackendFactory = std::function<std::unique_ptr<SolverBackend>()>;

// Runs `draws` independent restrictions of `sample_size` edges each. Draw
// w uses seed base_seed + w, so any draw can be reproduced in isolation.
// Draws solve in parallel across params.threads workers (one backend per
// worker); results and statistics do not depend on the thread count.
// Throws if every draw fails; isolated failures are recorded and skipped.
LowerBoundRun lower_bound_run(const SupplyChainInstance& inst, int sample_size, int draws,
                              std::uint64_t base_seed, const SolverParams& params,
                              bool stratified = false,
                              const BackendFactory& factory = nullptr);

}  // namespace chainbound
