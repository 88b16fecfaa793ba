#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chainbound/model.hpp"

namespace chainbound {

enum class VarKind : std::uint8_t { continuous, integer };

struct VarRef {
    int index = 0;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = 0.0;
};

enum class Relation : std::uint8_t { eq, le, ge };

struct LinearTerm {
    int var = 0;
    double coef = 0.0;
    bool operator==(const LinearTerm&) const = default;
};

struct ConstraintRow {
    std::string name;
    std::vector<LinearTerm> terms;
    Relation rel = Relation::eq;
    double rhs = 0.0;
};

// Semantic role of each variable, keyed back to the instance entity it
// stands for. agg_flow entities index into a CoarsePlan's aggregated-edge
// table rather than the instance edge list.
enum class VarRole : std::uint8_t { supply, demand, flow, process, build, agg_flow };

struct VarLabel {
    VarRole role = VarRole::supply;
    int entity = 0;
    bool operator==(const VarLabel&) const = default;
};

// A maximization MILP. Bounds live on the variables; rows carry only the
// coupling constraints. Immutable once built.
struct MilpProblem {
    std::string name;
    std::vector<VarRef> vars;
    std::vector<double> objective;  // aligned with vars
    std::vector<ConstraintRow> rows;
    std::vector<VarLabel> labels;  // aligned with vars

    int num_vars() const { return static_cast<int>(vars.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
    int count_vars(VarKind kind) const;
    int count_rows(Relation rel) const;

    bool operator==(const MilpProblem&) const;
};

// Structural sanity: coefficients reference declared variables, labels form
// a bijection, bounds ordered, integer bounds integral. Empty iff sound.
std::vector<std::string> validate_problem(const MilpProblem& prob);

enum class SolveStatus : std::uint8_t {
    optimal,
    feasible_with_gap,
    infeasible,
    unbounded,
    time_limit,
    memory_limit,
};

const char* to_string(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    std::optional<double> objective;            // present iff a solution exists
    std::vector<double> values;                 // empty unless a solution exists
    std::optional<double> best_bound;           // valid dual bound when known
    double mip_gap = 0.0;                       // solver-reported relative gap
    double wall_seconds = 0.0;
    std::optional<double> peak_memory_mb;

    bool has_solution() const {
        return status == SolveStatus::optimal || status == SolveStatus::feasible_with_gap;
    }
};

struct SolverParams {
    double time_limit = 0.0;  // seconds; 0 disables
    double mip_gap = 0.0;     // relative; 0 solves to proven optimality
    int threads = 1;          // used for draw/trial parallelism by the run layers
    std::uint64_t seed = 0;
};

// Narrow backend contract: load a problem, solve under the given params,
// report status and values. One backend session must not be shared across
// threads; distinct problems may be solved concurrently on distinct
// backends.
class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual std::string name() const = 0;
    virtual SolveResult solve(const MilpProblem& prob, const SolverParams& params) = 0;
};

/// Builds the full design model: welfare objective, one balance row per
// (node, product) including empty ones, and one capacity-link row per
// technology. Capacity limits are variable bounds.
MilpProblem formulate_full(const SupplyChainInstance& inst);

// Same model restricted to a subset of transport edges (ids must be sorted,
// unique, and in range). Flow variables for omitted edges simply do not
// exist, which is how the edge-sampled restriction is expressed.
MilpProblem formulate_with_edges(const SupplyChainInstance& inst,
                                 const std::vector<int>& active_edges,
                                 const std::string& name);

// Closed-form size accounting for the full model, usable without building it.
struct ModelSize {
    long long continuous_vars = 0;
    long long integer_vars = 0;
    long long equality_rows = 0;
    long long inequality_rows = 0;
};
ModelSize full_model_size(long long suppliers, long long consumers, long long edges,
                          long long technologies, long long nodes, long long products);

// Maps solved values back into instance coordinates via the variable labels.
// Flow variables absent from the problem (removed edges) stay zero.
// Aggregated-flow variables are never mapped back to per-edge flows; when a
// problem contains them the welfare reconciliation against the solver
// objective is skipped (the aggregated objective prices flows differently).
Allocation extract_allocation(const SupplyChainInstance& inst, const MilpProblem& prob,
                              const SolveResult& result);

// CPLEX-style LP text format, for debugging and external cross-checks.
void write_lp(std::ostream& os, const MilpProblem& prob);
std::string to_lp_string(const MilpProblem& prob);

}  // namespace chainbound
