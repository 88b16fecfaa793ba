#pragma once

#include <memory>
#include <string>

#include "chainbound/milp.hpp"

namespace chainbound {

// Built-in MILP backend: LP relaxations via the bounded simplex, integrality
// by depth-first branch and bound on the build-count variables. Determinism
// follows from the LP solver and the fixed branching rule; `threads` is
// accepted but this backend always runs single-threaded.
class BranchBoundBackend : public SolverBackend {
public:
    std::string name() const override { return "branch-bound"; }
    SolveResult solve(const MilpProblem& prob, const SolverParams& params) override;
};

// Returns the backend selected by CHAINBOUND_BACKEND, defaulting to the
// built-in one. Unknown names throw so misconfiguration fails loudly.
std::unique_ptr<SolverBackend> make_backend();
std::unique_ptr<SolverBackend> make_backend(const std::string& name);

}  // namespace chainbound
