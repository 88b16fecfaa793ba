#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainbound/milp.hpp"
#include "chainbound/rng.hpp"
#include "chainbound/sampling.hpp"  // BackendFactory
#include "chainbound/stats.hpp"

namespace chainbound {

// One aggregated transport arc between two partitions. Pooling member
// capacities and pricing at the cheapest member cost only ever enlarges the
// feasible region and raises the objective, which is what makes the coarse
// model a relaxation.
struct AggEdge {
    int src_part = 0;
    int dst_part = 0;
    int product = 0;
    double capacity = 0.0;     // sum over members
    double cost = 0.0;         // min over members
    std::vector<int> members;  // fine edge ids, ascending
};

struct CoarsePlan {
    std::vector<int> pivots;         // node ids, strictly ascending
    std::vector<int> partition;      // node -> partition index
    std::vector<AggEdge> agg_edges;  // sorted by (src_part, dst_part, product)
    std::vector<int> local_edges;    // edges internal to one partition, ascending

    int num_partitions() const { return static_cast<int>(pivots.size()); }
};

// Uniform pivot choice; the result is ascending by node id, so partition
// indexes enumerate pivots in id order.
std::vector<int> select_pivots(const SupplyChainInstance& inst, int count, Rng& rng);

// Nearest-pivot assignment, which is the exact minimizer of the summed
// node-to-pivot distance (each node independently picks its closest pivot).
// Distance ties go to the lowest partition index; a pivot always claims
// itself even when another pivot shares its coordinates.
std::vector<int> assign_partitions(const SupplyChainInstance& inst,
                                   const std::vector<int>& pivots);

// Objective the assignment minimizes; exposed so small cases can be checked
// against exhaustive enumeration.
double assignment_cost(const SupplyChainInstance& inst, const std::vector<int>& pivots,
                       const std::vector<int>& partition);

// Partition assignment plus edge classification for a given pivot set.
CoarsePlan build_plan(const SupplyChainInstance& inst, const std::vector<int>& pivots);
CoarsePlan make_plan(const SupplyChainInstance& inst, int partitions, Rng& rng);

// Aggregated model: balance rows per (partition, product); suppliers,
// consumers and technologies keep their identity inside their partition's
// rows; cross-partition flows use the aggregated arcs; intra-partition
// transport is treated as free and unbounded, i.e. dropped.
MilpProblem formulate_coarse(const SupplyChainInstance& inst, const CoarsePlan& plan);

// Size accounting without building the model.
ModelSize coarse_model_size(const SupplyChainInstance& inst, const CoarsePlan& plan);

// Relaxation certificate for one allocation: any feasible fine-level point
// must map to a feasible coarse point whose coarse welfare is no smaller.
// `ok` is false when either half fails, with the reason in `detail`.
struct LiftCheck {
    bool ok = false;
    std::string detail;
    double fine_welfare = 0.0;
    double coarse_welfare = 0.0;
};
LiftCheck lift_check(const SupplyChainInstance& inst, const CoarsePlan& plan,
                     const Allocation& alloc, double tol = 1e-6);

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    bool solved = false;
    std::string failure;
    double bound = 0.0;  // coarse optimum, an upper bound on the full one
    double wall_seconds = 0.0;
};

struct UpperBoundRun {
    int partitions = 0;  // after clamping to the node count
    int trials = 0;
    std::vector<TrialResult> results;
    SampleStats bound_stats;   // over the solved trials
    double best_bound = 0.0;   // the tightest (smallest) bound
    int best_trial = -1;
    CoarsePlan best_plan;
};

// Runs `trials` independent pivot draws at the given partition count; trial
// w uses seed base_seed + w. Parallel across params.threads workers, with
// results independent of scheduling. Throws if every trial fails.
UpperBoundRun upper_bound_run(const SupplyChainInstance& inst, int partitions, int trials,
                              std::uint64_t base_seed, const SolverParams& params,
                              const BackendFactory& factory = nullptr);

}  // namespace chainbound
