#include "chainbound/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace chainbound {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDualTol = 1e-10;      // reduced-cost threshold
constexpr double kPivotTol = 1e-8;      // minimum acceptable pivot magnitude
constexpr double kFeasTol = 1e-9;       // bound violation tolerance
constexpr int kRefactorEvery = 64;
constexpr int kStallLimit = 2000;       // degenerate pivots before Bland's rule

enum class NonbasicState { at_lower, at_upper, at_zero };  // at_zero: free variable

// Columns of the working problem: structural variables, one slack per row,
// one artificial per row. The artificial carries a +/-1 coefficient chosen
// so the all-artificial basis starts feasible.
struct Tableau {
    int m = 0;              // rows
    int n_struct = 0;       // structural columns
    int n_total = 0;        // struct + slack + artificial
    std::vector<double> lower, upper;          // per column
    std::vector<double> cost;                  // phase-2 cost per column
    std::vector<std::vector<LinearTerm>> cols; // sparse column data (row, coef)
    std::vector<double> rhs;

    int slack(int row) const { return n_struct + row; }
    int artificial(int row) const { return n_struct + m + row; }
};

class Simplex {
public:
    Simplex(const MilpProblem& prob, const std::vector<double>* lb_override,
            const std::vector<double>* ub_override, const LpOptions& options)
        : options_(options) {
        build(prob, lb_override, ub_override);
    }

    LpSolution run() {
        LpSolution out;
        init_basis();

        // Phase 1: drive artificial infeasibility to zero (skipped when the
        // starting point is already feasible, which holds for all-zero rhs).
        double infeas = 0.0;
        for (int r = 0; r < t_.m; ++r) infeas += std::abs(value_[t_.artificial(r)]);
        if (infeas > kFeasTol) {
            std::vector<double> phase1(t_.n_total, 0.0);
            for (int r = 0; r < t_.m; ++r) phase1[t_.artificial(r)] = -1.0;
            const LpStatus st = optimize(phase1, /*phase1=*/true);
            if (st != LpStatus::optimal) {
                out.status = st;
                out.iterations = iterations_;
                return out;
            }
            double leftover = 0.0;
            for (int r = 0; r < t_.m; ++r) leftover += std::abs(value_[t_.artificial(r)]);
            if (leftover > 1e-7 * (1.0 + rhs_scale_)) {
                out.status = LpStatus::infeasible;
                out.iterations = iterations_;
                return out;
            }
        }
        // Artificials are pinned to zero from here on. Basic ones keep their
        // (tiny) computed value so the factorization stays consistent; the
        // ratio test evicts them the moment they would move.
        for (int r = 0; r < t_.m; ++r) {
            const int a = t_.artificial(r);
            t_.lower[a] = 0.0;
            t_.upper[a] = 0.0;
            if (!in_basis_[a]) value_[a] = 0.0;
        }

        const LpStatus st = optimize(t_.cost, /*phase1=*/false);
        out.status = st;
        out.iterations = iterations_;
        if (st != LpStatus::optimal) return out;

        out.x.assign(t_.n_struct, 0.0);
        for (int j = 0; j < t_.n_struct; ++j) out.x[j] = value_[j];
        double obj = 0.0;
        for (int j = 0; j < t_.n_struct; ++j) obj += t_.cost[j] * out.x[j];
        out.objective = obj;
        return out;
    }

private:
    void build(const MilpProblem& prob, const std::vector<double>* lb_override,
               const std::vector<double>* ub_override) {
        t_.m = prob.num_rows();
        t_.n_struct = prob.num_vars();
        t_.n_total = t_.n_struct + 2 * t_.m;
        t_.lower.assign(t_.n_total, 0.0);
        t_.upper.assign(t_.n_total, 0.0);
        t_.cost.assign(t_.n_total, 0.0);
        t_.cols.assign(t_.n_total, {});
        t_.rhs.assign(t_.m, 0.0);

        for (int j = 0; j < t_.n_struct; ++j) {
            t_.lower[j] = lb_override ? (*lb_override)[j] : prob.vars[j].lower;
            t_.upper[j] = ub_override ? (*ub_override)[j] : prob.vars[j].upper;
            t_.cost[j] = prob.objective[j];
        }
        for (int r = 0; r < t_.m; ++r) {
            const ConstraintRow& row = prob.rows[r];
            for (const LinearTerm& term : row.terms)
                if (term.coef != 0.0) t_.cols[term.var].push_back({r, term.coef});
            t_.rhs[r] = row.rhs;
            const int s = t_.slack(r);
            t_.cols[s].push_back({r, 1.0});
            switch (row.rel) {
                case Relation::le: t_.lower[s] = 0.0; t_.upper[s] = kInf; break;
                case Relation::ge: t_.lower[s] = -kInf; t_.upper[s] = 0.0; break;
                case Relation::eq: t_.lower[s] = 0.0; t_.upper[s] = 0.0; break;
            }
            rhs_scale_ = std::max(rhs_scale_, std::abs(row.rhs));
        }
    }

    // Nonbasic start value: finite lower bound preferred, then upper, else 0.
    double rest_value(int j) const {
        if (std::isfinite(t_.lower[j])) return t_.lower[j];
        if (std::isfinite(t_.upper[j])) return t_.upper[j];
        return 0.0;
    }

    NonbasicState rest_state(int j) const {
        if (std::isfinite(t_.lower[j])) return NonbasicState::at_lower;
        if (std::isfinite(t_.upper[j])) return NonbasicState::at_upper;
        return NonbasicState::at_zero;
    }

    void init_basis() {
        value_.assign(t_.n_total, 0.0);
        state_.assign(t_.n_total, NonbasicState::at_lower);
        in_basis_.assign(t_.n_total, false);
        basis_.assign(t_.m, 0);
        basis_row_of_.assign(t_.n_total, -1);

        for (int j = 0; j < t_.n_struct + t_.m; ++j) {
            value_[j] = rest_value(j);
            state_[j] = rest_state(j);
        }
        // residual r = rhs - A x determines the artificial sign and value
        std::vector<double> residual = t_.rhs;
        for (int j = 0; j < t_.n_struct + t_.m; ++j) {
            if (value_[j] == 0.0) continue;
            for (const LinearTerm& term : t_.cols[j]) residual[term.var] -= term.coef * value_[j];
        }
        binv_.assign(static_cast<std::size_t>(t_.m) * t_.m, 0.0);
        for (int r = 0; r < t_.m; ++r) {
            const int a = t_.artificial(r);
            const double sign = residual[r] < 0.0 ? -1.0 : 1.0;
            t_.cols[a].push_back({r, sign});
            t_.lower[a] = 0.0;
            t_.upper[a] = kInf;
            value_[a] = std::abs(residual[r]);
            basis_[r] = a;
            basis_row_of_[a] = r;
            in_basis_[a] = true;
            binv_[static_cast<std::size_t>(r) * t_.m + r] = sign;  // B^{-1} = diag(sign)
        }
    }

    // y = c_B^T B^{-1}
    void compute_duals(const std::vector<double>& cost, std::vector<double>& y) const {
        y.assign(t_.m, 0.0);
        for (int r = 0; r < t_.m; ++r) {
            const double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            const double* row = &binv_[static_cast<std::size_t>(r) * t_.m];
            for (int k = 0; k < t_.m; ++k) y[k] += cb * row[k];
        }
    }

    double reduced_cost(const std::vector<double>& cost, const std::vector<double>& y,
                        int j) const {
        double d = cost[j];
        for (const LinearTerm& term : t_.cols[j]) d -= y[term.var] * term.coef;
        return d;
    }

    // w = B^{-1} A_j
    void ftran(int j, std::vector<double>& w) const {
        w.assign(t_.m, 0.0);
        for (const LinearTerm& term : t_.cols[j]) {
            const double a = term.coef;
            for (int r = 0; r < t_.m; ++r)
                w[r] += binv_[static_cast<std::size_t>(r) * t_.m + term.var] * a;
        }
    }

    void refactor() {
        // rebuild B^{-1} by Gauss-Jordan with partial pivoting
        const int m = t_.m;
        std::vector<double> mat(static_cast<std::size_t>(m) * 2 * m, 0.0);
        auto at = [&](int r, int c) -> double& { return mat[static_cast<std::size_t>(r) * 2 * m + c]; };
        for (int c = 0; c < m; ++c)
            for (const LinearTerm& term : t_.cols[basis_[c]]) at(term.var, c) = term.coef;
        for (int r = 0; r < m; ++r) at(r, m + r) = 1.0;
        for (int c = 0; c < m; ++c) {
            int piv = c;
            for (int r = c + 1; r < m; ++r)
                if (std::abs(at(r, c)) > std::abs(at(piv, c))) piv = r;
            if (std::abs(at(piv, c)) < 1e-12)
                throw std::runtime_error("basis became singular during refactorization");
            if (piv != c)
                for (int k = 0; k < 2 * m; ++k) std::swap(at(piv, k), at(c, k));
            const double d = at(c, c);
            for (int k = 0; k < 2 * m; ++k) at(c, k) /= d;
            for (int r = 0; r < m; ++r) {
                if (r == c) continue;
                const double f = at(r, c);
                if (f == 0.0) continue;
                for (int k = 0; k < 2 * m; ++k) at(r, k) -= f * at(c, k);
            }
        }
        // column swap bookkeeping: mat row order tracks pivoting already
        for (int r = 0; r < m; ++r)
            for (int k = 0; k < m; ++k) binv_[static_cast<std::size_t>(r) * m + k] = at(r, m + k);
        recompute_basic_values();
    }

    void recompute_basic_values() {
        std::vector<double> residual = t_.rhs;
        for (int j = 0; j < t_.n_total; ++j) {
            if (in_basis_[j] || value_[j] == 0.0) continue;
            for (const LinearTerm& term : t_.cols[j]) residual[term.var] -= term.coef * value_[j];
        }
        for (int r = 0; r < t_.m; ++r) {
            double v = 0.0;
            const double* row = &binv_[static_cast<std::size_t>(r) * t_.m];
            for (int k = 0; k < t_.m; ++k) v += row[k] * residual[k];
            value_[basis_[r]] = v;
        }
    }

    bool deadline_passed() const {
        return options_.deadline && std::chrono::steady_clock::now() > *options_.deadline;
    }

    LpStatus optimize(const std::vector<double>& cost, bool phase1) {
        const long cap = options_.max_iterations > 0
                             ? options_.max_iterations
                             : 50000 + 100L * (t_.m + t_.n_struct);
        std::vector<double> y, w;
        bool bland = false;
        int stall = 0;
        int since_refactor = 0;

        for (;;) {
            if (iterations_ >= cap) return LpStatus::iteration_limit;
            if ((iterations_ & 0x3f) == 0 && deadline_passed()) return LpStatus::time_limit;
            ++iterations_;

            compute_duals(cost, y);

            // entering column
            int enter = -1;
            double best = 0.0;
            int direction = 0;
            const int scan_limit = phase1 ? t_.n_total : t_.n_struct + t_.m;
            for (int j = 0; j < scan_limit; ++j) {
                if (in_basis_[j]) continue;
                if (t_.lower[j] == t_.upper[j]) continue;  // fixed, cannot move
                const double d = reduced_cost(cost, y, j);
                int dir = 0;
                if (state_[j] == NonbasicState::at_lower && d > kDualTol) dir = 1;
                else if (state_[j] == NonbasicState::at_upper && d < -kDualTol) dir = -1;
                else if (state_[j] == NonbasicState::at_zero && std::abs(d) > kDualTol)
                    dir = d > 0 ? 1 : -1;
                if (dir == 0) continue;
                if (bland) { enter = j; direction = dir; break; }
                if (std::abs(d) > best) { best = std::abs(d); enter = j; direction = dir; }
            }
            if (enter < 0) return LpStatus::optimal;

            ftran(enter, w);

            // ratio test: how far can the entering variable move
            double step = kInf;
            int leave_row = -1;
            double leave_pivot = 0.0;
            bool leave_at_upper = false;
            if (std::isfinite(t_.upper[enter]) && std::isfinite(t_.lower[enter]))
                step = t_.upper[enter] - t_.lower[enter];  // bound flip
            for (int r = 0; r < t_.m; ++r) {
                const double g = direction * w[r];
                if (std::abs(g) < kPivotTol) continue;
                const int b = basis_[r];
                double limit;
                bool hits_upper;
                if (g > 0) {  // basic value decreases toward its lower bound
                    if (!std::isfinite(t_.lower[b])) continue;
                    limit = (value_[b] - t_.lower[b]) / g;
                    hits_upper = false;
                } else {  // basic value increases toward its upper bound
                    if (!std::isfinite(t_.upper[b])) continue;
                    limit = (t_.upper[b] - value_[b]) / (-g);
                    hits_upper = true;
                }
                if (limit < -kFeasTol) limit = 0.0;
                const bool better =
                    limit < step - 1e-12 ||
                    (limit < step + 1e-12 && leave_row >= 0 &&
                     (bland ? basis_[r] < basis_[leave_row] : std::abs(w[r]) > std::abs(leave_pivot)));
                if (leave_row < 0 ? limit < step : better) {
                    step = std::max(limit, 0.0);
                    leave_row = r;
                    leave_pivot = w[r];
                    leave_at_upper = hits_upper;
                }
            }

            if (!std::isfinite(step)) return phase1 ? LpStatus::infeasible : LpStatus::unbounded;

            if (step < 1e-12) {
                if (++stall > kStallLimit) bland = true;
            } else {
                stall = 0;
            }

            // apply the move
            const double delta = direction * step;
            for (int r = 0; r < t_.m; ++r)
                if (w[r] != 0.0) value_[basis_[r]] -= delta * w[r];

            if (leave_row < 0) {
                // bound flip, basis unchanged
                value_[enter] += delta;
                state_[enter] = (direction > 0) ? NonbasicState::at_upper : NonbasicState::at_lower;
                continue;
            }

            const int leave = basis_[leave_row];
            value_[enter] = value_at_rest(enter) + delta;
            value_[leave] = leave_at_upper ? t_.upper[leave] : t_.lower[leave];
            state_[leave] = leave_at_upper ? NonbasicState::at_upper : NonbasicState::at_lower;
            in_basis_[leave] = false;
            basis_row_of_[leave] = -1;
            basis_[leave_row] = enter;
            basis_row_of_[enter] = leave_row;
            in_basis_[enter] = true;

            // elementary update of B^{-1}
            const double piv = leave_pivot;
            double* prow = &binv_[static_cast<std::size_t>(leave_row) * t_.m];
            for (int k = 0; k < t_.m; ++k) prow[k] /= piv;
            for (int r = 0; r < t_.m; ++r) {
                if (r == leave_row) continue;
                const double f = w[r];
                if (f == 0.0) continue;
                double* row = &binv_[static_cast<std::size_t>(r) * t_.m];
                for (int k = 0; k < t_.m; ++k) row[k] -= f * prow[k];
            }

            if (++since_refactor >= kRefactorEvery) {
                refactor();
                since_refactor = 0;
            }
        }
    }

    // value a variable rests at prior to entering (its current bound)
    double value_at_rest(int j) const { return value_[j]; }

    Tableau t_;
    LpOptions options_;
    std::vector<double> value_;
    std::vector<NonbasicState> state_;
    std::vector<bool> in_basis_;
    std::vector<int> basis_;           // basic column per row
    std::vector<int> basis_row_of_;
    std::vector<double> binv_;         // dense m x m row-major
    double rhs_scale_ = 0.0;
    long iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const MilpProblem& prob, const LpOptions& options,
                    const std::vector<double>* lower_override,
                    const std::vector<double>* upper_override) {
    if (prob.num_vars() == 0) {
        // still must check constant rows
        for (const ConstraintRow& row : prob.rows) {
            const bool ok = row.rel == Relation::eq   ? row.rhs == 0.0
                            : row.rel == Relation::le ? row.rhs >= 0.0
                                                      : row.rhs <= 0.0;
            if (!ok) return {LpStatus::infeasible, 0.0, {}, 0};
        }
        return {LpStatus::optimal, 0.0, {}, 0};
    }
    Simplex solver(prob, lower_override, upper_override, options);
    return solver.run();
}

}  // namespace chainbound
