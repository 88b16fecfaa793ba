#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "chainbound/milp.hpp"

namespace chainbound {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, time_limit };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;        // valid when optimal
    std::vector<double> x;         // primal values, valid when optimal
    long iterations = 0;
};

struct LpOptions {
    long max_iterations = 0;  // 0 picks a size-based default
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Maximizes prob.objective over prob.rows and variable bounds, ignoring
// integrality. Bounded-variable two-phase primal simplex with a dense basis
// inverse; suitable for the mid-size models this library produces.
// Overridden bounds, when given, replace the problem's variable bounds
// (used by branch-and-bound).
LpSolution solve_lp(const MilpProblem& prob, const LpOptions& options = {},
                    const std::vector<double>* lower_override = nullptr,
                    const std::vector<double>* upper_override = nullptr);

}  // namespace chainbound
