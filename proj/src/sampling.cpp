#include "chainbound/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <thread>

#include "chainbound/solver.hpp"

namespace chainbound {
namespace {

std::vector<int> stratified_draw(const SupplyChainInstance& inst, int count, Rng& rng) {
    const int P = inst.num_products();
    std::vector<std::vector<int>> by_product(P);
    for (const TransportEdge& e : inst.edges()) by_product[e.product].push_back(e.id);

    // near-equal quotas, capped by group size; the shortfall from small
    // groups is handed to whichever groups still have headroom
    std::vector<int> quota(P, 0);
    const int base = count / P;
    const int rem = count % P;
    for (int p = 0; p < P; ++p)
        quota[p] = std::min<int>(static_cast<int>(by_product[p].size()), base + (p < rem ? 1 : 0));
    int assigned = 0;
    for (int p = 0; p < P; ++p) assigned += quota[p];
    int leftover = count - assigned;
    while (leftover > 0) {
        bool moved = false;
        for (int p = 0; p < P && leftover > 0; ++p) {
            if (quota[p] < static_cast<int>(by_product[p].size())) {
                ++quota[p];
                --leftover;
                moved = true;
            }
        }
        if (!moved) break;  // every group exhausted; count exceeded |edges|
    }

    std::vector<int> picked;
    picked.reserve(count);
    for (int p = 0; p < P; ++p) {
        const auto idx = sample_without_replacement(static_cast<int>(by_product[p].size()),
                                                    quota[p], rng);
        for (int i : idx) picked.push_back(by_product[p][i]);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

}  // namespace

std::vector<int> sample_edges(const SupplyChainInstance& inst, int count, Rng& rng,
                              bool stratified) {
    if (count <= 0) throw std::invalid_argument("sample_edges: count must be positive");
    const int total = inst.num_edges();
    if (count >= total) {
        std::vector<int> all(total);
        for (int l = 0; l < total; ++l) all[l] = l;
        return all;
    }
    if (stratified) return stratified_draw(inst, count, rng);
    return sample_without_replacement(total, count, rng);
}

MilpProblem formulate_sampled(const SupplyChainInstance& inst, const std::vector<int>& edges) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i] < 0 || edges[i] >= inst.num_edges())
            throw std::invalid_argument("formulate_sampled: edge id out of range");
        if (i > 0 && edges[i] <= edges[i - 1])
            throw std::invalid_argument("formulate_sampled: edge ids must be ascending");
    }
    return formulate_with_edges(inst, edges, "sampled_" + std::to_string(edges.size()));
}

LowerBoundRun lower_bound_run(const SupplyChainInstance& inst, int sample_size, int draws,
                              std::uint64_t base_seed, const SolverParams& params,
                              bool stratified, const BackendFactory& factory) {
    if (draws < 1) throw std::invalid_argument("lower_bound_run: need at least one draw");
    if (sample_size < 1) throw std::invalid_argument("lower_bound_run: sample_size must be positive");

    LowerBoundRun run;
    run.sample_size = std::min(sample_size, inst.num_edges());
    run.draws = draws;
    run.stratified = stratified;
    run.results.resize(draws);

    // Edge sets are generated sequentially from per-draw seeds, so the
    // composition of each restriction never depends on scheduling.
    for (int w = 0; w < draws; ++w) {
        DrawResult& r = run.results[w];
        r.draw = w;
        r.seed = base_seed + static_cast<std::uint64_t>(w);
        Rng rng(r.seed);
        r.edges = sample_edges(inst, run.sample_size, rng, stratified);
    }

    const BackendFactory make = factory ? factory : [] { return make_backend(); };

    // raw solver points are kept until the winner is known, then dropped
    std::vector<SolveResult> points(draws);
    auto solve_one = [&](int w, SolverBackend& backend) {
        DrawResult& r = run.results[w];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const MilpProblem prob = formulate_sampled(inst, r.edges);
            points[w] = backend.solve(prob, params);
            if (points[w].has_solution()) {
                r.welfare = *points[w].objective;
                r.solved = true;
            } else {
                r.failure = std::string("solver returned ") + to_string(points[w].status);
            }
        } catch (const std::exception& e) {
            r.failure = e.what();
        }
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    const int workers = std::max(1, std::min(params.threads, draws));
    if (workers == 1) {
        auto backend = make();
        for (int w = 0; w < draws; ++w) solve_one(w, *backend);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                auto backend = make();
                for (int w = next.fetch_add(1); w < draws; w = next.fetch_add(1))
                    solve_one(w, *backend);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<double> welfares;
    welfares.reserve(draws);
    run.best_welfare = -std::numeric_limits<double>::infinity();
    for (const DrawResult& r : run.results) {
        if (!r.solved) continue;
        welfares.push_back(r.welfare);
        if (r.welfare > run.best_welfare) {  // ties keep the lowest draw index
            run.best_welfare = r.welfare;
            run.best_draw = r.draw;
        }
    }
    if (welfares.empty())
        throw std::runtime_error("lower_bound_run: every draw failed (first failure: " +
                                 run.results.front().failure + ")");
    run.welfare_stats = summarize(welfares);

    const DrawResult& best = run.results[run.best_draw];
    run.best_allocation =
        extract_allocation(inst, formulate_sampled(inst, best.edges), points[run.best_draw]);
    return run;
}

}  // namespace chainbound
