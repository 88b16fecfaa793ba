#include "chainbound/milp.hpp"

#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"

using namespace chainbound;
using namespace chainbound::testing;

TEST_CASE("full formulation matches the closed-form size accounting") {
    const auto inst = chain_instance();
    const auto prob = formulate_full(inst);
    CHECK(validate_problem(prob).empty());

    const ModelSize sz = full_model_size(inst.num_suppliers(), inst.num_consumers(),
                                         inst.num_edges(), inst.num_technologies(),
                                         inst.num_nodes(), inst.num_products());
    CHECK(sz.continuous_vars == 1 + 1 + 1 + 1);  // s, d, f, z
    CHECK(sz.integer_vars == 1);
    CHECK(sz.equality_rows == 2 * 2);
    CHECK(sz.inequality_rows == 1);

    CHECK(prob.count_vars(VarKind::continuous) == sz.continuous_vars);
    CHECK(prob.count_vars(VarKind::integer) == sz.integer_vars);
    CHECK(prob.count_rows(Relation::eq) == sz.equality_rows);
    CHECK(prob.count_rows(Relation::le) + prob.count_rows(Relation::ge) == sz.inequality_rows);
}

TEST_CASE("variable order and bounds follow the declared layout") {
    const auto inst = chain_instance();
    const auto prob = formulate_full(inst);

    REQUIRE(prob.num_vars() == 5);
    CHECK(prob.labels[0].role == VarRole::supply);
    CHECK(prob.labels[1].role == VarRole::demand);
    CHECK(prob.labels[2].role == VarRole::flow);
    CHECK(prob.labels[3].role == VarRole::process);
    CHECK(prob.labels[4].role == VarRole::build);

    CHECK(prob.vars[0].upper == 10.0);            // supplier capacity
    CHECK(prob.vars[1].upper == 8.0);             // consumer capacity
    CHECK(prob.vars[2].upper == 10.0);            // edge capacity
    CHECK(prob.vars[3].upper == 12.0);            // unit_capacity * max_facilities
    CHECK(prob.vars[4].upper == 3.0);
    CHECK(prob.vars[4].kind == VarKind::integer);

    CHECK(prob.objective[0] == -1.0);   // supply cost
    CHECK(prob.objective[1] == 10.0);   // demand value
    CHECK(prob.objective[2] == -1.0);   // transport cost
    CHECK(prob.objective[3] == -0.5);   // operating cost
    CHECK(prob.objective[4] == -2.0);   // install cost
}

TEST_CASE("balance rows cover every node-product pair including empty ones") {
    const auto inst = chain_instance();
    const auto prob = formulate_full(inst);
    int eq = 0;
    for (const auto& row : prob.rows)
        if (row.rel == Relation::eq) {
            ++eq;
            CHECK(row.rhs == 0.0);
        }
    CHECK(eq == 4);
    // (node 1, product 0) hosts nothing, so its balance row is empty
    bool found_empty = false;
    for (const auto& row : prob.rows)
        if (row.name == "balance_n1_p0") {
            found_empty = true;
            CHECK(row.terms.empty());
        }
    CHECK(found_empty);
}

TEST_CASE("formulating twice yields byte-identical problems") {
    const auto inst = chain_instance();
    CHECK(formulate_full(inst) == formulate_full(inst));
}

TEST_CASE("restricting edges removes exactly the omitted flow variables") {
    const auto inst = link_instance();
    const auto restricted = formulate_with_edges(inst, {}, "no_edges");
    CHECK(restricted.num_vars() == 2);  // supply + demand remain
    for (const auto& lab : restricted.labels) CHECK(lab.role != VarRole::flow);
    // balance rows survive with the flow terms dropped
    CHECK(restricted.count_rows(Relation::eq) == 2);
}

TEST_CASE("problem validation catches structural corruption") {
    const auto inst = chain_instance();
    auto prob = formulate_full(inst);
    CHECK(validate_problem(prob).empty());

    auto corrupt = [&](auto mutate) {
        auto p = prob;
        mutate(p);
        return validate_problem(p);
    };
    CHECK(!corrupt([](MilpProblem& p) { p.objective.pop_back(); }).empty());
    CHECK(!corrupt([](MilpProblem& p) { p.vars[1].index = 0; }).empty());
    CHECK(!corrupt([](MilpProblem& p) { p.vars[0].lower = 99.0; }).empty());
    CHECK(!corrupt([](MilpProblem& p) { p.rows[0].terms.push_back({77, 1.0}); }).empty());
    CHECK(!corrupt([](MilpProblem& p) { p.labels[0] = p.labels[1]; }).empty());
    // integer variables must have integral bounds
    CHECK(!corrupt([](MilpProblem& p) { p.vars.back().upper = 2.5; }).empty());
}

TEST_CASE("extract_allocation maps labeled values back and reconciles welfare") {
    const auto inst = chain_instance();
    const auto prob = formulate_full(inst);

    SolveResult res;
    res.status = SolveStatus::optimal;
    res.objective = 24.0;
    res.values = {10.0, 5.0, 5.0, 10.0, 3.0};  // s, d, f, z, y

    const Allocation a = extract_allocation(inst, prob, res);
    CHECK(a.supply[0] == 10.0);
    CHECK(a.demand[0] == 5.0);
    CHECK(a.flow[0] == 5.0);
    CHECK(a.process[0] == 10.0);
    CHECK(a.built[0] == 3);
    CHECK(a.welfare == doctest::Approx(24.0));

    SUBCASE("near-integral build counts are rounded") {
        auto r = res;
        r.values[4] = 3.0000000001;
        CHECK(extract_allocation(inst, prob, r).built[0] == 3);
    }
    SUBCASE("far-from-integral build counts are rejected") {
        auto r = res;
        r.values[4] = 2.5;
        CHECK_THROWS(extract_allocation(inst, prob, r));
    }
    SUBCASE("statuses without a solution are rejected") {
        SolveResult empty;
        empty.status = SolveStatus::infeasible;
        CHECK_THROWS(extract_allocation(inst, prob, empty));
    }
}

TEST_CASE("LP text export names every section") {
    const auto prob = formulate_full(link_instance());
    std::ostringstream os;
    write_lp(os, prob);
    const std::string text = os.str();
    CHECK(text.find("Maximize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("Bounds") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
    CHECK(text.find("balance_n0_p0") != std::string::npos);
}
