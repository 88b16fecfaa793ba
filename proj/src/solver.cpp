#include "chainbound/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include "chainbound/simplex.hpp"

namespace chainbound {
namespace {

constexpr double kIntTol = 1e-6;   // how far from integral a value may sit
constexpr double kPruneTol = 1e-9;

struct Node {
    std::vector<double> lower, upper;
    int depth = 0;
};

}  // namespace

SolveResult BranchBoundBackend::solve(const MilpProblem& prob, const SolverParams& params) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult out;
    out.status = SolveStatus::infeasible;

    const auto issues = validate_problem(prob);
    if (!issues.empty()) throw std::invalid_argument("malformed problem: " + issues.front());

    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (params.time_limit > 0)
        deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(params.time_limit));

    std::vector<int> int_vars;
    for (const VarRef& v : prob.vars)
        if (v.kind == VarKind::integer) int_vars.push_back(v.index);

    LpOptions lp_opts;
    lp_opts.deadline = deadline;

    double incumbent_obj = -std::numeric_limits<double>::infinity();
    std::vector<double> incumbent_x;
    // box relaxation (drop every row): a valid bound before the first LP
    // finishes, so even an instant deadline has something to report
    double root_bound = 0.0;
    for (int j = 0; j < prob.num_vars(); ++j) {
        const double c = prob.objective[j];
        if (c == 0.0) continue;
        root_bound += std::max(c * prob.vars[j].lower, c * prob.vars[j].upper);
    }
    double pruned_best = -std::numeric_limits<double>::infinity();
    bool hit_deadline = false;

    Node root;
    root.lower.resize(prob.num_vars());
    root.upper.resize(prob.num_vars());
    for (int j = 0; j < prob.num_vars(); ++j) {
        root.lower[j] = prob.vars[j].lower;
        root.upper[j] = prob.vars[j].upper;
    }

    // DFS keeps memory bounded; the most recent subproblem sits on top,
    // which tends to reach integral incumbents quickly on these models.
    std::vector<Node> stack;
    stack.push_back(std::move(root));

    while (!stack.empty()) {
        if (deadline && std::chrono::steady_clock::now() > *deadline) {
            hit_deadline = true;
            break;
        }
        Node node = std::move(stack.back());
        stack.pop_back();

        LpSolution rel = solve_lp(prob, lp_opts, &node.lower, &node.upper);
        if (rel.status == LpStatus::time_limit) {
            hit_deadline = true;
            break;
        }
        if (rel.status == LpStatus::unbounded) {
            // A relaxation without a finite optimum means the integer problem
            // is unbounded or infeasible; these models are always bounded, so
            // surface it rather than guessing.
            out.status = SolveStatus::unbounded;
            out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return out;
        }
        if (rel.status == LpStatus::iteration_limit)
            throw std::runtime_error("simplex iteration limit reached; model may be degenerate");
        if (rel.status == LpStatus::infeasible) continue;

        if (node.depth == 0) root_bound = rel.objective;
        const double slack = std::max(params.mip_gap * std::max(1.0, std::abs(incumbent_obj)),
                                      kPruneTol * (1.0 + std::abs(incumbent_obj)));
        if (rel.objective <= incumbent_obj + slack) {
            // this subtree cannot improve the incumbent beyond the accepted
            // tolerance; its LP value still contributes to the proven bound
            pruned_best = std::max(pruned_best, rel.objective);
            continue;
        }

        // most-fractional branching
        int branch = -1;
        double best_frac = kIntTol;
        for (int j : int_vars) {
            const double v = rel.x[j];
            const double frac = std::abs(v - std::round(v));
            if (frac > best_frac) {
                best_frac = frac;
                branch = j;
            }
        }

        if (branch < 0) {
            // integral (within tolerance): candidate incumbent
            if (rel.objective > incumbent_obj) {
                incumbent_obj = rel.objective;
                incumbent_x = rel.x;
                for (int j : int_vars) incumbent_x[j] = std::round(incumbent_x[j]);
            }
            continue;
        }

        const double v = rel.x[branch];
        Node down = node, up = std::move(node);
        down.upper[branch] = std::floor(v);
        down.depth++;
        up.lower[branch] = std::ceil(v);
        up.depth++;
        // push the floor child last so the DFS explores it first; rounding
        // down is the branch that stays feasible for capacity-style links
        stack.push_back(std::move(up));
        stack.push_back(std::move(down));
    }

    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (std::isfinite(incumbent_obj)) {
        out.objective = incumbent_obj;
        out.values = incumbent_x;
        const double denom = std::max(std::abs(incumbent_obj), 1e-10);
        if (hit_deadline) {
            out.status = SolveStatus::feasible_with_gap;
            out.best_bound = root_bound;
            out.mip_gap = std::abs(root_bound - incumbent_obj) / denom;
        } else {
            // every leaf was fathomed: the max over incumbent and pruned LP
            // values is a proven bound on the true optimum
            out.status = SolveStatus::optimal;
            out.best_bound = std::max(incumbent_obj, pruned_best);
            out.mip_gap = (*out.best_bound - incumbent_obj) / denom;
        }
        return out;
    }
    out.status = hit_deadline ? SolveStatus::time_limit : SolveStatus::infeasible;
    // no incumbent, but a finished root relaxation is still a usable bound
    if (hit_deadline && std::isfinite(root_bound)) out.best_bound = root_bound;
    return out;
}

std::unique_ptr<SolverBackend> make_backend(const std::string& name) {
    if (name.empty() || name == "branch-bound" || name == "builtin")
        return std::make_unique<BranchBoundBackend>();
    throw std::invalid_argument("unknown solver backend '" + name +
                                "' (supported: branch-bound)");
}

std::unique_ptr<SolverBackend> make_backend() {
    const char* env = std::getenv("CHAINBOUND_BACKEND");
    return make_backend(env ? std::string(env) : std::string());
}

}  // namespace chainbound
