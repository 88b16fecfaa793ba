#include "chainbound/coarsening.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "chainbound/solver.hpp"

namespace chainbound {

std::vector<int> select_pivots(const SupplyChainInstance& inst, int count, Rng& rng) {
    if (count < 1) throw std::invalid_argument("select_pivots: need at least one pivot");
    const int n = inst.num_nodes();
    if (count >= n) {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    return sample_without_replacement(n, count, rng);
}

std::vector<int> assign_partitions(const SupplyChainInstance& inst,
                                   const std::vector<int>& pivots) {
    if (pivots.empty()) throw std::invalid_argument("assign_partitions: empty pivot set");
    for (std::size_t c = 0; c < pivots.size(); ++c) {
        if (pivots[c] < 0 || pivots[c] >= inst.num_nodes())
            throw std::invalid_argument("assign_partitions: pivot out of range");
        if (c > 0 && pivots[c] <= pivots[c - 1])
            throw std::invalid_argument("assign_partitions: pivots must be strictly ascending");
    }
    std::vector<int> part(inst.num_nodes(), -1);
    for (std::size_t c = 0; c < pivots.size(); ++c) part[pivots[c]] = static_cast<int>(c);
    for (int n = 0; n < inst.num_nodes(); ++n) {
        if (part[n] >= 0) continue;  // pivots claim themselves
        int best = 0;
        double best_d = inst.distance(n, pivots[0]);
        for (std::size_t c = 1; c < pivots.size(); ++c) {
            const double d = inst.distance(n, pivots[c]);
            if (d < best_d) {  // strict: ties keep the lowest partition index
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        part[n] = best;
    }
    return part;
}

double assignment_cost(const SupplyChainInstance& inst, const std::vector<int>& pivots,
                       const std::vector<int>& partition) {
    double total = 0.0;
    for (int n = 0; n < inst.num_nodes(); ++n) total += inst.distance(n, pivots[partition[n]]);
    return total;
}

CoarsePlan build_plan(const SupplyChainInstance& inst, const std::vector<int>& pivots) {
    CoarsePlan plan;
    plan.pivots = pivots;
    plan.partition = assign_partitions(inst, pivots);

    // group cross-partition edges by (source partition, target partition,
    // product); map iteration gives the canonical ordering for free
    std::map<std::tuple<int, int, int>, AggEdge> groups;
    for (const TransportEdge& e : inst.edges()) {
        const int cs = plan.partition[e.src];
        const int cd = plan.partition[e.dst];
        if (cs == cd) {
            plan.local_edges.push_back(e.id);
            continue;
        }
        AggEdge& g = groups[{cs, cd, e.product}];
        if (g.members.empty()) {
            g.src_part = cs;
            g.dst_part = cd;
            g.product = e.product;
            g.cost = e.cost;
        }
        g.capacity += e.capacity;
        g.cost = std::min(g.cost, e.cost);
        g.members.push_back(e.id);
    }
    plan.agg_edges.reserve(groups.size());
    for (auto& [key, g] : groups) plan.agg_edges.push_back(std::move(g));
    return plan;
}

CoarsePlan make_plan(const SupplyChainInstance& inst, int partitions, Rng& rng) {
    return build_plan(inst, select_pivots(inst, partitions, rng));
}

MilpProblem formulate_coarse(const SupplyChainInstance& inst, const CoarsePlan& plan) {
    const auto violations = validate_instance(inst);
    if (!violations.empty())
        throw std::invalid_argument("invalid instance: " + violations.front().entity + ": " +
                                    violations.front().rule);
    if (static_cast<int>(plan.partition.size()) != inst.num_nodes())
        throw std::invalid_argument("formulate_coarse: plan does not match the instance");

    MilpProblem prob;
    prob.name = "coarse_" + std::to_string(plan.num_partitions());

    const int S = inst.num_suppliers();
    const int D = inst.num_consumers();
    const int A = static_cast<int>(plan.agg_edges.size());
    const int T = inst.num_technologies();
    prob.vars.reserve(S + D + A + 2 * T);

    auto add_var = [&](VarKind kind, double lower, double upper, double obj, VarRole role,
                       int entity) {
        prob.vars.push_back({static_cast<int>(prob.vars.size()), kind, lower, upper});
        prob.objective.push_back(obj);
        prob.labels.push_back({role, entity});
    };

    for (const Supplier& s : inst.suppliers())
        add_var(VarKind::continuous, 0.0, s.capacity, -s.cost, VarRole::supply, s.id);
    for (const Consumer& c : inst.consumers())
        add_var(VarKind::continuous, 0.0, c.capacity, c.value, VarRole::demand, c.id);
    const int agg_base = S + D;
    for (int k = 0; k < A; ++k) {
        const AggEdge& g = plan.agg_edges[k];
        add_var(VarKind::continuous, 0.0, g.capacity, -g.cost, VarRole::agg_flow, k);
    }
    const int process_base = agg_base + A;
    for (const Technology& t : inst.technologies())
        add_var(VarKind::continuous, 0.0, t.unit_capacity * t.max_facilities, -t.op_cost,
                VarRole::process, t.id);
    const int build_base = process_base + T;
    for (const Technology& t : inst.technologies())
        add_var(VarKind::integer, 0.0, static_cast<double>(t.max_facilities), -t.install_cost,
                VarRole::build, t.id);

    // balance per (partition, product): entity terms land in the partition
    // that hosts their node; aggregated arcs connect partitions directly
    const int C = plan.num_partitions();
    const int P = inst.num_products();
    std::vector<ConstraintRow> balances(static_cast<std::size_t>(C) * P);
    for (int c = 0; c < C; ++c)
        for (int p = 0; p < P; ++p) {
            auto& row = balances[static_cast<std::size_t>(c) * P + p];
            row.name = "balance_c" + std::to_string(c) + "_p" + std::to_string(p);
            row.rel = Relation::eq;
            row.rhs = 0.0;
        }
    auto row_of = [&](int c, int p) -> ConstraintRow& {
        return balances[static_cast<std::size_t>(c) * P + p];
    };

    for (const Supplier& s : inst.suppliers())
        row_of(plan.partition[s.node], s.product).terms.push_back({s.id, 1.0});
    for (const Consumer& c : inst.consumers())
        row_of(plan.partition[c.node], c.product).terms.push_back({S + c.id, -1.0});
    for (int k = 0; k < A; ++k) {
        const AggEdge& g = plan.agg_edges[k];
        row_of(g.dst_part, g.product).terms.push_back({agg_base + k, 1.0});
        row_of(g.src_part, g.product).terms.push_back({agg_base + k, -1.0});
    }
    for (const Technology& t : inst.technologies()) {
        const int c = plan.partition[t.node];
        for (const auto& [p, gamma] : t.yields)
            if (gamma != 0.0) row_of(c, p).terms.push_back({process_base + t.id, gamma});
    }
    for (auto& row : balances) prob.rows.push_back(std::move(row));

    for (const Technology& t : inst.technologies()) {
        ConstraintRow row;
        row.name = "capacity_t" + std::to_string(t.id);
        row.rel = Relation::le;
        row.rhs = 0.0;
        row.terms.push_back({process_base + t.id, 1.0});
        row.terms.push_back({build_base + t.id, -t.unit_capacity});
        prob.rows.push_back(std::move(row));
    }
    return prob;
}

ModelSize coarse_model_size(const SupplyChainInstance& inst, const CoarsePlan& plan) {
    ModelSize s;
    s.continuous_vars = inst.num_suppliers() + inst.num_consumers() +
                        static_cast<long long>(plan.agg_edges.size()) + inst.num_technologies();
    s.integer_vars = inst.num_technologies();
    s.equality_rows = static_cast<long long>(plan.num_partitions()) * inst.num_products();
    s.inequality_rows = inst.num_technologies();
    return s;
}

LiftCheck lift_check(const SupplyChainInstance& inst, const CoarsePlan& plan,
                     const Allocation& alloc, double tol) {
    LiftCheck out;
    const auto fine = check_feasibility(inst, alloc, tol);
    if (!fine.feasible) {
        out.detail = "allocation is not feasible at the fine level";
        return out;
    }
    out.fine_welfare = evaluate_welfare(inst, alloc);

    // aggregated image of the flows
    std::vector<double> agg_flow(plan.agg_edges.size(), 0.0);
    for (std::size_t k = 0; k < plan.agg_edges.size(); ++k) {
        const AggEdge& g = plan.agg_edges[k];
        for (int l : g.members) agg_flow[k] += alloc.flow[l];
        if (agg_flow[k] > g.capacity + tol * (1.0 + std::abs(g.capacity))) {
            std::ostringstream os;
            os << "aggregated arc " << k << " exceeds pooled capacity: " << agg_flow[k] << " > "
               << g.capacity;
            out.detail = os.str();
            return out;
        }
    }

    // coarse balances must close: local flows cancel inside a partition when
    // the fine balances hold, so any residual signals a broken plan
    const int C = plan.num_partitions();
    const int P = inst.num_products();
    std::vector<double> residual(static_cast<std::size_t>(C) * P, 0.0);
    std::vector<double> scale(static_cast<std::size_t>(C) * P, 0.0);
    auto idx = [&](int c, int p) { return static_cast<std::size_t>(c) * P + p; };
    for (const Supplier& s : inst.suppliers()) {
        residual[idx(plan.partition[s.node], s.product)] += alloc.supply[s.id];
        scale[idx(plan.partition[s.node], s.product)] += alloc.supply[s.id];
    }
    for (const Consumer& c : inst.consumers())
        residual[idx(plan.partition[c.node], c.product)] -= alloc.demand[c.id];
    for (std::size_t k = 0; k < plan.agg_edges.size(); ++k) {
        const AggEdge& g = plan.agg_edges[k];
        residual[idx(g.dst_part, g.product)] += agg_flow[k];
        scale[idx(g.dst_part, g.product)] += agg_flow[k];
        residual[idx(g.src_part, g.product)] -= agg_flow[k];
    }
    for (const Technology& t : inst.technologies()) {
        const int c = plan.partition[t.node];
        for (const auto& [p, gamma] : t.yields) {
            const double term = gamma * alloc.process[t.id];
            residual[idx(c, p)] += term;
            if (term > 0.0) scale[idx(c, p)] += term;
        }
    }
    for (int c = 0; c < C; ++c)
        for (int p = 0; p < P; ++p)
            if (std::abs(residual[idx(c, p)]) > tol * (1.0 + scale[idx(c, p)])) {
                std::ostringstream os;
                os << "coarse balance broken at partition " << c << " product " << p
                   << " (residual " << residual[idx(c, p)] << ")";
                out.detail = os.str();
                return out;
            }

    // coarse welfare prices pooled flow at the cheapest member and treats
    // local transport as free, so it can only gain on the fine welfare
    double coarse = 0.0;
    for (const Consumer& c : inst.consumers()) coarse += c.value * alloc.demand[c.id];
    for (const Supplier& s : inst.suppliers()) coarse -= s.cost * alloc.supply[s.id];
    for (std::size_t k = 0; k < plan.agg_edges.size(); ++k)
        coarse -= plan.agg_edges[k].cost * agg_flow[k];
    for (const Technology& t : inst.technologies())
        coarse -= t.op_cost * alloc.process[t.id] + t.install_cost * alloc.built[t.id];
    out.coarse_welfare = coarse;

    if (coarse < out.fine_welfare - tol * (1.0 + std::abs(out.fine_welfare))) {
        std::ostringstream os;
        os << "coarse welfare " << coarse << " fell below fine welfare " << out.fine_welfare;
        out.detail = os.str();
        return out;
    }
    out.ok = true;
    return out;
}

UpperBoundRun upper_bound_run(const SupplyChainInstance& inst, int partitions, int trials,
                              std::uint64_t base_seed, const SolverParams& params,
                              const BackendFactory& factory) {
    if (trials < 1) throw std::invalid_argument("upper_bound_run: need at least one trial");
    if (partitions < 1) throw std::invalid_argument("upper_bound_run: partitions must be positive");

    UpperBoundRun run;
    run.partitions = std::min(partitions, inst.num_nodes());
    run.trials = trials;
    run.results.resize(trials);

    // plans are derived sequentially from per-trial seeds (cheap); solving
    // is what gets distributed over workers
    std::vector<CoarsePlan> plans(trials);
    for (int w = 0; w < trials; ++w) {
        TrialResult& r = run.results[w];
        r.trial = w;
        r.seed = base_seed + static_cast<std::uint64_t>(w);
        Rng rng(r.seed);
        plans[w] = make_plan(inst, run.partitions, rng);
    }

    const BackendFactory make = factory ? factory : [] { return make_backend(); };

    auto solve_one = [&](int w, SolverBackend& backend) {
        TrialResult& r = run.results[w];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const MilpProblem prob = formulate_coarse(inst, plans[w]);
            const SolveResult res = backend.solve(prob, params);
            if (res.has_solution()) {
                r.bound = *res.objective;
                r.solved = true;
            } else {
                r.failure = std::string("solver returned ") + to_string(res.status);
            }
        } catch (const std::exception& e) {
            r.failure = e.what();
        }
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    const int workers = std::max(1, std::min(params.threads, trials));
    if (workers == 1) {
        auto backend = make();
        for (int w = 0; w < trials; ++w) solve_one(w, *backend);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                auto backend = make();
                for (int w = next.fetch_add(1); w < trials; w = next.fetch_add(1))
                    solve_one(w, *backend);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<double> bounds;
    bounds.reserve(trials);
    run.best_bound = std::numeric_limits<double>::infinity();
    for (const TrialResult& r : run.results) {
        if (!r.solved) continue;
        bounds.push_back(r.bound);
        if (r.bound < run.best_bound) {  // ties keep the lowest trial index
            run.best_bound = r.bound;
            run.best_trial = r.trial;
        }
    }
    if (bounds.empty())
        throw std::runtime_error("upper_bound_run: every trial failed (first failure: " +
                                 run.results.front().failure + ")");
    run.bound_stats = summarize(bounds);
    run.best_plan = plans[run.best_trial];
    return run;
}

}  // namespace chainbound
