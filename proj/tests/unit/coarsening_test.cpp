#include "chainbound/coarsening.hpp"

#include <algorithm>
#include <cmath>

#include "chainbound/generator.hpp"
#include "chainbound/solver.hpp"
#include "doctest.h"

using namespace chainbound;

namespace {

SupplyChainInstance medium_instance(std::uint64_t seed = 21) {
    GenConfig cfg;
    cfg.nodes = 9;
    cfg.products = 2;
    cfg.technologies = 2;
    cfg.seed = seed;
    return generate(cfg);
}

}  // namespace

TEST_CASE("pivot draws come back ascending and clamp at the node count") {
    const auto inst = medium_instance();
    Rng rng(1);
    const auto p = select_pivots(inst, 4, rng);
    REQUIRE(p.size() == 4);
    CHECK(std::is_sorted(p.begin(), p.end()));
    CHECK(p.back() < inst.num_nodes());

    Rng rng2(2);
    const auto all = select_pivots(inst, 99, rng2);
    REQUIRE(static_cast<int>(all.size()) == inst.num_nodes());
    for (int i = 0; i < inst.num_nodes(); ++i) CHECK(all[i] == i);
    CHECK_THROWS(select_pivots(inst, 0, rng2));
}

TEST_CASE("every node joins the partition of its nearest pivot") {
    const auto inst = medium_instance();
    const std::vector<int> pivots{1, 4, 7};
    const auto part = assign_partitions(inst, pivots);
    REQUIRE(static_cast<int>(part.size()) == inst.num_nodes());
    CHECK(part[1] == 0);
    CHECK(part[4] == 1);
    CHECK(part[7] == 2);
    for (int n = 0; n < inst.num_nodes(); ++n) {
        REQUIRE(part[n] >= 0);
        REQUIRE(part[n] < 3);
        const double chosen = inst.distance(n, pivots[part[n]]);
        for (int c = 0; c < 3; ++c) CHECK(chosen <= inst.distance(n, pivots[c]) + 1e-12);
    }
    CHECK_THROWS(assign_partitions(inst, {}));
    CHECK_THROWS(assign_partitions(inst, {4, 1}));   // not ascending
    CHECK_THROWS(assign_partitions(inst, {1, 99}));  // out of range
}

TEST_CASE("nearest-pivot assignment matches exhaustive minimization") {
    // small enough to enumerate every assignment of non-pivot nodes
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GenConfig cfg;
        cfg.nodes = 6;
        cfg.seed = 40 + seed;
        const auto inst = generate(cfg);
        const std::vector<int> pivots{0, 3, 5};
        const auto part = assign_partitions(inst, pivots);
        const double got = assignment_cost(inst, pivots, part);

        double best = std::numeric_limits<double>::infinity();
        std::vector<int> trial(inst.num_nodes());
        trial[0] = 0;
        trial[3] = 1;
        trial[5] = 2;
        const std::vector<int> free_nodes{1, 2, 4};
        for (int mask = 0; mask < 27; ++mask) {
            int m = mask;
            for (int f : free_nodes) {
                trial[f] = m % 3;
                m /= 3;
            }
            best = std::min(best, assignment_cost(inst, pivots, trial));
        }
        CHECK(got == doctest::Approx(best));
    }
}

TEST_CASE("plans classify edges and pool capacities") {
    const auto inst = medium_instance();
    Rng rng(7);
    const auto plan = make_plan(inst, 3, rng);

    // every fine edge lands in exactly one bucket
    std::size_t members = plan.local_edges.size();
    for (const auto& g : plan.agg_edges) members += g.members.size();
    CHECK(members == static_cast<std::size_t>(inst.num_edges()));

    for (int l : plan.local_edges) {
        const auto& e = inst.edges()[l];
        CHECK(plan.partition[e.src] == plan.partition[e.dst]);
    }
    for (std::size_t k = 0; k < plan.agg_edges.size(); ++k) {
        const auto& g = plan.agg_edges[k];
        CHECK(g.src_part != g.dst_part);
        double cap = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        for (int l : g.members) {
            const auto& e = inst.edges()[l];
            CHECK(plan.partition[e.src] == g.src_part);
            CHECK(plan.partition[e.dst] == g.dst_part);
            CHECK(e.product == g.product);
            cap += e.capacity;
            lo = std::min(lo, e.cost);
        }
        CHECK(g.capacity == doctest::Approx(cap));
        CHECK(g.cost == doctest::Approx(lo));
        CHECK(std::is_sorted(g.members.begin(), g.members.end()));
        if (k > 0) {
            const auto& prev = plan.agg_edges[k - 1];
            CHECK(std::tuple(prev.src_part, prev.dst_part, prev.product) <
                  std::tuple(g.src_part, g.dst_part, g.product));
        }
    }
}

TEST_CASE("coarse model size follows the closed form") {
    const auto inst = medium_instance();
    Rng rng(8);
    const auto plan = make_plan(inst, 3, rng);
    const auto prob = formulate_coarse(inst, plan);
    CHECK(validate_problem(prob).empty());

    const auto sz = coarse_model_size(inst, plan);
    CHECK(prob.count_vars(VarKind::continuous) == sz.continuous_vars);
    CHECK(prob.count_vars(VarKind::integer) == sz.integer_vars);
    CHECK(prob.count_rows(Relation::eq) == sz.equality_rows);
    CHECK(sz.equality_rows == 3LL * inst.num_products());
    CHECK(prob.count_rows(Relation::le) == sz.inequality_rows);
}

TEST_CASE("coarse optimum is an upper bound, exact at full resolution") {
    const auto backend = make_backend();
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = medium_instance(60 + seed);
        const auto full = backend->solve(formulate_full(inst), {});
        REQUIRE(full.status == SolveStatus::optimal);

        Rng rng(seed);
        const auto plan = make_plan(inst, 3, rng);
        const auto coarse = backend->solve(formulate_coarse(inst, plan), {});
        REQUIRE(coarse.status == SolveStatus::optimal);
        CHECK(*coarse.objective >= *full.objective - 1e-7 * (1.0 + std::abs(*full.objective)));

        // one partition per node: aggregation degenerates to the identity
        Rng rng2(seed);
        const auto exact_plan = make_plan(inst, inst.num_nodes(), rng2);
        CHECK(exact_plan.local_edges.empty());
        const auto exact = backend->solve(formulate_coarse(inst, exact_plan), {});
        CHECK(*exact.objective == doctest::Approx(*full.objective));
    }
}

TEST_CASE("lift_check certifies optimal allocations and rejects broken ones") {
    const auto backend = make_backend();
    const auto inst = medium_instance();
    const auto prob = formulate_full(inst);
    const auto res = backend->solve(prob, {});
    REQUIRE(res.status == SolveStatus::optimal);
    const auto alloc = extract_allocation(inst, prob, res);

    for (int parts = 1; parts <= inst.num_nodes(); ++parts) {
        Rng rng(parts);
        const auto plan = make_plan(inst, parts, rng);
        const auto check = lift_check(inst, plan, alloc);
        CHECK(check.ok);
        CHECK(check.detail.empty());
        CHECK(check.coarse_welfare >= check.fine_welfare - 1e-9);
    }

    Rng rng(3);
    const auto plan = make_plan(inst, 3, rng);
    auto broken = alloc;
    broken.supply[0] += 100.0;  // violates the supplier capacity and balance
    CHECK(!lift_check(inst, plan, broken).ok);
}

TEST_CASE("upper_bound_run is reproducible, thread-invariant, and keeps the min") {
    const auto inst = medium_instance();
    const auto a = upper_bound_run(inst, 3, 4, 700, {});
    SolverParams threaded;
    threaded.threads = 3;
    const auto b = upper_bound_run(inst, 3, 4, 700, threaded);

    REQUIRE(a.results.size() == 4);
    for (int w = 0; w < 4; ++w) {
        CHECK(a.results[w].seed == 700 + static_cast<std::uint64_t>(w));
        REQUIRE(a.results[w].solved);
        CHECK(a.results[w].bound == b.results[w].bound);
    }
    double min_seen = a.results[0].bound;
    for (const auto& r : a.results) min_seen = std::min(min_seen, r.bound);
    CHECK(a.best_bound == doctest::Approx(min_seen));
    CHECK(a.best_bound == b.best_bound);
    CHECK(a.best_trial == b.best_trial);

    CHECK_THROWS(upper_bound_run(inst, 0, 2, 1, {}));
    CHECK_THROWS(upper_bound_run(inst, 2, 0, 1, {}));
}
