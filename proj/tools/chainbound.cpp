// Command-line surface: generate instances, solve them directly, run the
// sampling (lower bound) and coarsening (upper bound) phases on their own,
// run the full multi-level protocol, or diagnose instances and allocations.
//
// Exit codes: 0 success, 1 usage/data error, 2 solver failure,
// 3 infeasible/unbounded model.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chainbound/generator.hpp"
#include "chainbound/gsc.hpp"
#include "chainbound/io.hpp"
#include "chainbound/solver.hpp"

using namespace chainbound;

namespace {

constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kSolverFailure = 2;
constexpr int kInfeasibleModel = 3;

int fail_usage(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return kUsageError;
}

int fail_solver(const std::string& msg) {
    std::cerr << "solver failure: " << msg << "\n";
    return kSolverFailure;
}

SupplyChainInstance load_instance(const std::string& path) {
    auto inst = read_bundle(path);
    const auto bad = validate_instance(inst);
    if (!bad.empty()) {
        std::string msg = path + " fails validation:";
        std::size_t shown = 0;
        for (const auto& v : bad) {
            if (++shown > 10) {
                msg += "\n  ... " + std::to_string(bad.size() - 10) + " more";
                break;
            }
            msg += "\n  " + v.entity + ": " + v.rule;
        }
        throw std::runtime_error(msg);
    }
    return inst;
}

// "count" or "max"; max maps to the instance dimension for that slot.
int parse_count(const std::string& tok, int maximum, const std::string& what) {
    if (tok == "max") return maximum;
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad " + what + " '" + tok + "' (positive integer or 'max')");
    }
}

// Schedule grammar: "edges:partitions[:draws]" triplets, comma separated.
std::vector<LevelSpec> parse_levels(const std::string& text, const SupplyChainInstance& inst) {
    std::vector<LevelSpec> levels;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string item = text.substr(start, end - start);
        start = end + 1;
        if (item.empty()) throw std::invalid_argument("empty level in schedule '" + text + "'");

        std::vector<std::string> parts;
        std::size_t p = 0;
        while (p <= item.size()) {
            auto q = item.find(':', p);
            if (q == std::string::npos) q = item.size();
            parts.push_back(item.substr(p, q - p));
            p = q + 1;
        }
        if (parts.size() < 2 || parts.size() > 3)
            throw std::invalid_argument("level '" + item +
                                        "' must be edges:partitions[:draws]");
        LevelSpec spec;
        spec.edges = parse_count(parts[0], inst.num_edges(), "edge count");
        spec.partitions = parse_count(parts[1], inst.num_nodes(), "partition count");
        spec.draws = parts.size() == 3 ? parse_count(parts[2], 1 << 20, "draw count") : 1;
        levels.push_back(spec);
    }
    if (levels.empty()) throw std::invalid_argument("empty level schedule");
    return levels;
}

// Common provenance block; every document a command writes starts with this.
nlohmann::ordered_json provenance(const std::string& command, const std::string& instance,
                                  const SolverParams& params) {
    return {{"command", command},
            {"instance", instance},
            {"backend", make_backend()->name()},
            {"solver", to_json(params)}};
}

void maybe_write(const nlohmann::ordered_json& doc, const std::string& out) {
    if (!out.empty()) write_json(doc, out);
}

struct SolveFlags {
    std::string instance;
    std::string out;
    SolverParams params;
};

struct PhaseFlags {  // shared by sample / coarsen / gsc
    std::string instance;
    std::string out;
    std::uint64_t seed = 0;
    SolverParams params;
};

int cmd_gen(const GenConfig& cfg, const std::string& out) {
    SupplyChainInstance inst;
    try {
        inst = generate(cfg);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    try {
        write_bundle(inst, out);
        nlohmann::ordered_json doc{
            {"command", "gen"},
            {"format_version", kBundleFormatVersion},
            {"nodes", cfg.nodes},
            {"products", cfg.products},
            {"technologies", cfg.technologies},
            {"tech_density", cfg.tech_density},
            {"edge_rule", cfg.edge_rule == EdgeRule::all_pairs ? "all-pairs" : "radius"},
            {"radius", cfg.radius},
            {"cost_per_distance", cfg.cost_per_distance},
            {"ensure_profitable", cfg.ensure_profitable},
            {"seed", cfg.seed}};
        write_json(doc, out + "/provenance.json");
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    std::cout << "wrote " << out << " (" << inst.num_nodes() << " nodes, "
              << inst.num_products() << " products, " << inst.num_edges() << " edges)\n";
    return kOk;
}

int cmd_solve(const SolveFlags& f) {
    SupplyChainInstance inst;
    try {
        inst = load_instance(f.instance);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }

    SolveResult res;
    MilpProblem prob;
    try {
        prob = formulate_full(inst);
        res = make_backend()->solve(prob, f.params);
    } catch (const std::exception& e) {
        return fail_solver(e.what());
    }

    nlohmann::ordered_json doc{{"format_version", kReportFormatVersion},
                               {"kind", "solve_result"},
                               {"provenance", provenance("solve", f.instance, f.params)},
                               {"status", to_string(res.status)}};
    std::cout << "status=" << to_string(res.status);
    if (res.objective) {
        doc["welfare"] = *res.objective;
        std::cout << " welfare=" << format_double(*res.objective);
    }
    if (res.best_bound) {
        doc["best_bound"] = *res.best_bound;
        std::cout << " bound=" << format_double(*res.best_bound);
    }
    doc["mip_gap"] = res.mip_gap;
    doc["wall_seconds"] = res.wall_seconds;
    if (res.has_solution()) doc["allocation"] = to_json(extract_allocation(inst, prob, res));
    std::cout << "\n";

    try {
        maybe_write(doc, f.out);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    if (res.status == SolveStatus::infeasible || res.status == SolveStatus::unbounded)
        return kInfeasibleModel;
    return kOk;
}

int cmd_sample(const PhaseFlags& f, const std::string& edges_text, int draws,
               bool stratified) {
    SupplyChainInstance inst;
    int edges = 0;
    try {
        inst = load_instance(f.instance);
        edges = parse_count(edges_text, inst.num_edges(), "edge count");
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }

    LowerBoundRun run;
    try {
        run = lower_bound_run(inst, edges, draws, f.seed, f.params, stratified);
    } catch (const std::exception& e) {
        return fail_solver(e.what());
    }

    nlohmann::ordered_json doc{{"format_version", kReportFormatVersion},
                               {"kind", "sample_run"},
                               {"provenance", provenance("sample", f.instance, f.params)}};
    doc["provenance"]["seed"] = f.seed;
    doc["provenance"]["stratified"] = stratified;
    doc.update(lower_run_to_json(run));
    doc["best_allocation"] = to_json(run.best_allocation);

    std::printf("lb run: edges=%d draws=%d solved=%d best_lb=%s mean=%g sd=%g ci95=%g\n",
                run.sample_size, run.draws, run.welfare_stats.n,
                format_double(run.best_welfare).c_str(), run.welfare_stats.mean,
                run.welfare_stats.sd, run.welfare_stats.ci95);

    try {
        maybe_write(doc, f.out);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    return kOk;
}

int cmd_coarsen(const PhaseFlags& f, const std::string& parts_text, int trials) {
    SupplyChainInstance inst;
    int partitions = 0;
    try {
        inst = load_instance(f.instance);
        partitions = parse_count(parts_text, inst.num_nodes(), "partition count");
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }

    UpperBoundRun run;
    try {
        run = upper_bound_run(inst, partitions, trials, f.seed, f.params);
    } catch (const std::exception& e) {
        return fail_solver(e.what());
    }

    nlohmann::ordered_json doc{{"format_version", kReportFormatVersion},
                               {"kind", "coarsen_run"},
                               {"provenance", provenance("coarsen", f.instance, f.params)}};
    doc["provenance"]["seed"] = f.seed;
    doc.update(upper_run_to_json(run));
    // the winning plan, for inspection: pivots, node->partition map, and
    // the aggregated arc table
    nlohmann::ordered_json arcs = nlohmann::ordered_json::array();
    for (const auto& a : run.best_plan.agg_edges)
        arcs.push_back({{"src_part", a.src_part},
                        {"dst_part", a.dst_part},
                        {"product", a.product},
                        {"capacity", a.capacity},
                        {"cost", a.cost},
                        {"members", a.members}});
    doc["best_plan"] = {{"pivots", run.best_plan.pivots},
                        {"partition", run.best_plan.partition},
                        {"agg_edges", std::move(arcs)},
                        {"local_edges", run.best_plan.local_edges}};

    std::printf("ub run: partitions=%d trials=%d solved=%d best_ub=%s mean=%g sd=%g ci95=%g\n",
                run.partitions, run.trials, run.bound_stats.n,
                format_double(run.best_bound).c_str(), run.bound_stats.mean,
                run.bound_stats.sd, run.bound_stats.ci95);

    try {
        maybe_write(doc, f.out);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    return kOk;
}

int cmd_gsc(const PhaseFlags& f, const std::string& levels_text, double gap_tol,
            bool stratified) {
    SupplyChainInstance inst;
    std::vector<LevelSpec> levels;
    try {
        inst = load_instance(f.instance);
        levels = parse_levels(levels_text, inst);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }

    GscOptions opt;
    opt.seed = f.seed;
    opt.gap_tol_percent = gap_tol;
    opt.stratified = stratified;

    BoundReport report;
    try {
        report = run_gsc(inst, levels, f.params, opt);
    } catch (const std::exception& e) {
        return fail_solver(e.what());
    }

    std::printf("%5s %7s %6s %10s %12s %10s %6s %12s %10s %8s\n", "level", "edges", "draws",
                "avg lb s", "best lb", "sd lb", "parts", "best ub", "sd ub", "gap%");
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const auto& lv = report.levels[i];
        const double avg_lb =
            lv.spec.draws > 0 ? lv.lb_wall_seconds / lv.spec.draws : 0.0;
        std::printf("%5zu %7d %6d %10.3f %12.6g %10.4g %6d %12.6g %10.4g %8s\n", i + 1,
                    lv.spec.edges, lv.spec.draws, avg_lb, lv.lower.best_welfare,
                    lv.lower.welfare_stats.sd, lv.spec.partitions, lv.upper.best_bound,
                    lv.upper.bound_stats.sd, format_gap(lv.gap_percent).c_str());
    }
    std::printf("best_lb=%s best_ub=%s gap=%s%%%s\n", format_double(report.best_lb).c_str(),
                format_double(report.best_ub).c_str(), format_gap(report.gap_percent).c_str(),
                report.stopped_early ? " (stopped at gap tolerance)" : "");

    auto doc = report_to_json(report);
    doc["provenance"]["command"] = "gsc";
    doc["provenance"]["instance"] = f.instance;
    doc["provenance"]["levels"] = levels_text;
    doc["provenance"]["backend"] = make_backend()->name();
    try {
        maybe_write(doc, f.out);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }
    return kOk;
}

int cmd_check(const std::string& instance, const std::string& allocation_path, int partitions,
              std::uint64_t seed, double tol) {
    SupplyChainInstance inst;
    try {
        inst = read_bundle(instance);
    } catch (const std::exception& e) {
        return fail_usage(e.what());
    }

    bool all_ok = true;
    const auto bad = validate_instance(inst);
    if (bad.empty()) {
        std::cout << "instance: ok (" << inst.num_nodes() << " nodes, " << inst.num_edges()
                  << " edges)\n";
    } else {
        all_ok = false;
        std::cout << "instance: " << bad.size() << " violation(s)\n";
        for (const auto& v : bad) std::cout << "  " << v.entity << ": " << v.rule << "\n";
    }

    if (!allocation_path.empty()) {
        Allocation alloc;
        try {
            auto j = read_json(allocation_path);
            alloc = allocation_from_json(j.contains("allocation") ? j.at("allocation") : j);
        } catch (const std::exception& e) {
            return fail_usage(e.what());
        }
        const auto rep = check_feasibility(inst, alloc, tol);
        if (rep.feasible) {
            std::cout << "allocation: feasible, welfare="
                      << format_double(evaluate_welfare(inst, alloc))
                      << " max_balance_residual=" << rep.max_balance_residual << "\n";
        } else {
            all_ok = false;
            std::cout << "allocation: " << rep.violations.size() << " violation(s)\n";
            for (const auto& v : rep.violations)
                std::cout << "  " << v.constraint << " residual=" << v.residual << "\n";
        }

        if (partitions > 0) {
            Rng rng(seed);
            const auto plan = make_plan(inst, partitions, rng);
            const auto lc = lift_check(inst, plan, alloc, tol);
            if (lc.ok) {
                std::cout << "lift: ok, fine=" << format_double(lc.fine_welfare)
                          << " coarse=" << format_double(lc.coarse_welfare) << "\n";
            } else {
                all_ok = false;
                std::cout << "lift: FAILED: " << lc.detail << "\n";
            }
        }
    } else if (partitions > 0) {
        return fail_usage("--partitions needs --allocation to lift");
    }

    return all_ok ? kOk : kUsageError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph sampling & coarsening bounds for supply-chain design models"};
    app.require_subcommand(1);

    GenConfig gen_cfg;
    std::string gen_out;
    std::string edge_rule = "all-pairs";
    bool gen_toy = false;
    auto* gen = app.add_subcommand("gen", "generate a synthetic instance bundle");
    gen->add_flag("--toy", gen_toy, "fixed 2-node smoke instance (optimum 35)");
    gen->add_option("--nodes", gen_cfg.nodes, "number of spatial nodes");
    gen->add_option("--products", gen_cfg.products, "number of products in the chain");
    gen->add_option("--technologies", gen_cfg.technologies, "conversion technology types");
    gen->add_option("--tech-density", gen_cfg.tech_density,
                    "fraction of nodes hosting each type");
    gen->add_option("--edge-rule", edge_rule, "all-pairs or radius")
        ->check(CLI::IsMember({"all-pairs", "radius"}));
    gen->add_option("--radius", gen_cfg.radius, "connection radius for the radius rule");
    gen->add_option("--cost-per-distance", gen_cfg.cost_per_distance,
                    "transport cost per unit distance");
    bool gen_no_anchor = false;
    gen->add_flag("--no-profit-anchor", gen_no_anchor,
                  "skip planting a guaranteed profitable route");
    gen->add_option("--seed", gen_cfg.seed, "generator seed");
    gen->add_option("--out", gen_out, "bundle directory to write")->required();

    SolveFlags sf;
    auto* solve = app.add_subcommand("solve", "solve the full model directly");
    solve->add_option("--instance", sf.instance, "instance bundle directory")->required();
    solve->add_option("--time-limit", sf.params.time_limit, "seconds, 0 = none");
    solve->add_option("--mip-gap", sf.params.mip_gap, "relative gap to stop at");
    solve->add_option("--threads", sf.params.threads, "solver threads");
    solve->add_option("--out", sf.out, "write the result document here");

    PhaseFlags smf;
    std::string sample_edges_text = "max";
    int sample_draws = 1;
    bool sample_stratified = false;
    auto* sample = app.add_subcommand("sample", "edge-sampled restrictions (lower bounds)");
    sample->add_option("--instance", smf.instance, "instance bundle directory")->required();
    sample->add_option("--edges", sample_edges_text, "edges per draw, or 'max'");
    sample->add_option("--draws", sample_draws, "independent draws");
    sample->add_option("--seed", smf.seed, "base seed; draw w uses seed+w");
    sample->add_flag("--stratified", sample_stratified, "per-product quota sampling");
    sample->add_option("--threads", smf.params.threads, "parallel draw workers");
    sample->add_option("--time-limit", smf.params.time_limit, "per-solve seconds, 0 = none");
    sample->add_option("--mip-gap", smf.params.mip_gap, "per-solve relative gap");
    sample->add_option("--out", smf.out, "write the run document here");

    PhaseFlags cf;
    std::string coarsen_parts_text = "2";
    int coarsen_trials = 1;
    auto* coarsen = app.add_subcommand("coarsen", "aggregated relaxations (upper bounds)");
    coarsen->add_option("--instance", cf.instance, "instance bundle directory")->required();
    coarsen->add_option("--partitions", coarsen_parts_text, "partition count, or 'max'");
    coarsen->add_option("--trials", coarsen_trials, "independent pivot draws");
    coarsen->add_option("--seed", cf.seed, "base seed; trial w uses seed+w");
    coarsen->add_option("--threads", cf.params.threads, "parallel trial workers");
    coarsen->add_option("--time-limit", cf.params.time_limit, "per-solve seconds, 0 = none");
    coarsen->add_option("--mip-gap", cf.params.mip_gap, "per-solve relative gap");
    coarsen->add_option("--out", cf.out, "write the run document here");

    PhaseFlags gf;
    std::string levels_text;
    double gap_tol = 0.0;
    bool gsc_stratified = false;
    auto* gsc = app.add_subcommand("gsc", "full lower/upper bounding protocol");
    gsc->add_option("--instance", gf.instance, "instance bundle directory")->required();
    gsc->add_option("--levels", levels_text,
                    "schedule: edges:partitions[:draws],... ('max' allowed)")
        ->required();
    gsc->add_option("--seed", gf.seed, "master seed");
    gsc->add_option("--gap-tol", gap_tol, "stop once the gap (%) reaches this; 0 = run all");
    gsc->add_flag("--stratified", gsc_stratified, "per-product quota sampling");
    gsc->add_option("--threads", gf.params.threads, "parallel workers per phase");
    gsc->add_option("--time-limit", gf.params.time_limit, "per-solve seconds, 0 = none");
    gsc->add_option("--mip-gap", gf.params.mip_gap, "per-solve relative gap");
    gsc->add_option("--out", gf.out, "write the report document here");

    std::string chk_instance, chk_alloc;
    int chk_partitions = 0;
    std::uint64_t chk_seed = 0;
    double chk_tol = 1e-6;
    auto* check = app.add_subcommand("check", "validate an instance and diagnose allocations");
    check->add_option("--instance", chk_instance, "instance bundle directory")->required();
    check->add_option("--allocation", chk_alloc,
                      "allocation JSON (bare or a solve result document)");
    check->add_option("--partitions", chk_partitions,
                      "also lift the allocation through a plan of this size");
    check->add_option("--seed", chk_seed, "pivot seed for the lift plan");
    check->add_option("--tol", chk_tol, "feasibility tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (gen->parsed()) {
            if (gen_toy) return cmd_gen(toy_config(), gen_out);
            gen_cfg.edge_rule = edge_rule == "radius" ? EdgeRule::radius : EdgeRule::all_pairs;
            gen_cfg.ensure_profitable = !gen_no_anchor;
            return cmd_gen(gen_cfg, gen_out);
        }
        if (solve->parsed()) return cmd_solve(sf);
        if (sample->parsed())
            return cmd_sample(smf, sample_edges_text, sample_draws, sample_stratified);
        if (coarsen->parsed()) return cmd_coarsen(cf, coarsen_parts_text, coarsen_trials);
        if (gsc->parsed()) return cmd_gsc(gf, levels_text, gap_tol, gsc_stratified);
        if (check->parsed())
            return cmd_check(chk_instance, chk_alloc, chk_partitions, chk_seed, chk_tol);
    } catch (const std::exception& e) {
        // anything a command did not map itself is a data problem
        return fail_usage(e.what());
    }
    return fail_usage("no command given");
}
