#include "chainbound/simplex.hpp"

#include <cmath>
#include <limits>

#include "chainbound/rng.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chainbound;
using namespace chainbound::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bare LP assembly for solver tests; labels get dummy roles since only the
// solver looks at these problems.
MilpProblem make_lp(std::vector<double> lower, std::vector<double> upper,
                    std::vector<double> objective, std::vector<ConstraintRow> rows) {
    MilpProblem p;
    p.name = "test";
    const int n = static_cast<int>(objective.size());
    for (int j = 0; j < n; ++j) {
        p.vars.push_back({j, VarKind::continuous, lower[j], upper[j]});
        p.labels.push_back({VarRole::flow, j});
    }
    p.objective = std::move(objective);
    p.rows = std::move(rows);
    return p;
}

}  // namespace

// Worked corner check: the candidate corners of {x+y<=4, x+3y<=6, 0<=x,y<=3}
// score 9 at (3,0), 11 at (3,1), 6 at (0,2); the optimum is 11.
TEST_CASE("two-variable LP lands on the best corner") {
    auto p = make_lp({0, 0}, {3, 3}, {3, 2},
                     {{"r1", {{0, 1.0}, {1, 1.0}}, Relation::le, 4.0},
                      {"r2", {{0, 1.0}, {1, 3.0}}, Relation::le, 6.0}});
    const auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(11.0));
    CHECK(sol.x[0] == doctest::Approx(3.0));
    CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("equality and >= rows require the phase-1 start") {
    // max x+y subject to x+y=2, x-y>=0: any split with x>=y scores 2
    auto p = make_lp({0, 0}, {5, 5}, {1, 1},
                     {{"sum", {{0, 1.0}, {1, 1.0}}, Relation::eq, 2.0},
                      {"ord", {{0, 1.0}, {1, -1.0}}, Relation::ge, 0.0}});
    const auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(2.0));
    CHECK(sol.x[0] + sol.x[1] == doctest::Approx(2.0));
    CHECK(sol.x[0] >= sol.x[1] - 1e-9);
}

TEST_CASE("conflicting rows are reported infeasible") {
    auto p = make_lp({0}, {10}, {1}, {{"cap", {{0, 1.0}}, Relation::le, -1.0}});
    CHECK(solve_lp(p).status == LpStatus::infeasible);

    auto q = make_lp({0, 0}, {1, 1}, {1, 0},
                     {{"need", {{0, 1.0}, {1, 1.0}}, Relation::ge, 3.0}});
    CHECK(solve_lp(q).status == LpStatus::infeasible);
}

TEST_CASE("missing upper bounds are detected as unbounded") {
    auto p = make_lp({0}, {kInf}, {1}, {});
    CHECK(solve_lp(p).status == LpStatus::unbounded);

    // bounded by a row instead of a bound: finite again
    auto q = make_lp({0}, {kInf}, {1}, {{"cap", {{0, 2.0}}, Relation::le, 9.0}});
    const auto sol = solve_lp(q);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(4.5));
}

TEST_CASE("negative lower bounds work") {
    // max -x with x in [-3, 5]: sit at the lower bound
    auto p = make_lp({-3}, {5}, {-1}, {});
    const auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(3.0));
    CHECK(sol.x[0] == doctest::Approx(-3.0));
}

TEST_CASE(">= with positive rhs forces flow through phase 1") {
    // max x with x+y>=2, x,y in [0,1]: x=1, y must cover the remainder
    auto p = make_lp({0, 0}, {1, 1}, {1, 0},
                     {{"need", {{0, 1.0}, {1, 1.0}}, Relation::ge, 2.0}});
    const auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("box-only problems settle at the profitable bounds") {
    auto p = make_lp({0, 0, 0}, {1, 2, 3}, {5, -1, 2}, {});
    const auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(5 * 1 + 0 + 2 * 3));
}

TEST_CASE("redundant rows do not disturb the optimum") {
    std::vector<ConstraintRow> rows;
    for (int i = 0; i < 6; ++i)
        rows.push_back({"dup" + std::to_string(i), {{0, 1.0}, {1, 1.0}}, Relation::le, 4.0});
    auto p = make_lp({0, 0}, {kInf, kInf}, {1, 1}, std::move(rows));
    const auto sol = solve_lp(p);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == doctest::Approx(4.0));
}

TEST_CASE("bound overrides replace the stored bounds") {
    auto p = make_lp({0, 0}, {3, 3}, {3, 2},
                     {{"r1", {{0, 1.0}, {1, 1.0}}, Relation::le, 4.0},
                      {"r2", {{0, 1.0}, {1, 3.0}}, Relation::le, 6.0}});
    const std::vector<double> lo{0.0, 2.0};  // force y >= 2
    const std::vector<double> hi{3.0, 3.0};
    const auto sol = solve_lp(p, {}, &lo, &hi);
    REQUIRE(sol.status == LpStatus::optimal);
    // with y=2: x <= 0 from r2, so optimum is 3*0 + 2*2
    CHECK(sol.objective == doctest::Approx(4.0));
    CHECK(sol.x[1] >= 2.0 - 1e-9);

    // infeasible override: y pinned above what r1 allows together with x >= 3
    const std::vector<double> lo2{3.0, 2.0};
    CHECK(solve_lp(p, {}, &lo2, &hi).status == LpStatus::infeasible);
}

TEST_CASE("supply-chain relaxations reach their known optima") {
    // link fixture: pure LP, optimum 18 shipping 6 units
    {
        const auto prob = formulate_full(link_instance());
        const auto sol = solve_lp(prob);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(18.0));
    }
    // chain fixture: relaxation sits at y=2.5 with value 25
    {
        const auto prob = formulate_full(chain_instance());
        const auto sol = solve_lp(prob);
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.objective == doctest::Approx(25.0));
        CHECK(sol.x[4] == doctest::Approx(2.5));
    }
}

TEST_CASE("randomized transport LPs respect weak duality against greedy") {
    // On a bipartite single-product network the LP optimum is bounded below
    // by any greedy feasible shipping plan; check that across random cases.
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 2 + rng.range(0, 2);   // suppliers
        const int k = 2 + rng.range(0, 2);   // consumers
        std::vector<double> lower, upper, obj;
        std::vector<ConstraintRow> rows;
        // x[i][j] flow i->j, var index i*k+j
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < k; ++j) {
                lower.push_back(0.0);
                upper.push_back(rng.uniform(0.5, 3.0));
                obj.push_back(rng.uniform(0.1, 2.0));  // profit per unit
            }
        for (int i = 0; i < m; ++i) {
            ConstraintRow row{"sup" + std::to_string(i), {}, Relation::le,
                              rng.uniform(1.0, 4.0)};
            for (int j = 0; j < k; ++j) row.terms.push_back({i * k + j, 1.0});
            rows.push_back(std::move(row));
        }
        for (int j = 0; j < k; ++j) {
            ConstraintRow row{"dem" + std::to_string(j), {}, Relation::le,
                              rng.uniform(1.0, 4.0)};
            for (int i = 0; i < m; ++i) row.terms.push_back({i * k + j, 1.0});
            rows.push_back(std::move(row));
        }
        auto p = make_lp(lower, upper, obj, rows);
        const auto sol = solve_lp(p);
        REQUIRE(sol.status == LpStatus::optimal);

        // greedy: saturate the single most profitable arc
        double best_single = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < k; ++j) {
                const double cap = std::min({p.vars[i * k + j].upper, p.rows[i].rhs,
                                             p.rows[m + j].rhs});
                best_single = std::max(best_single, p.objective[i * k + j] * cap);
            }
        CHECK(sol.objective >= best_single - 1e-7);

        // primal feasibility of the reported point
        for (int i = 0; i < m; ++i) {
            double used = 0.0;
            for (int j = 0; j < k; ++j) used += sol.x[i * k + j];
            CHECK(used <= p.rows[i].rhs + 1e-7);
        }
    }
}
