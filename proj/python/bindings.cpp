// Python face of the library. Scalar-rich result types cross the boundary
// as plain dicts; the run/report layers cross as JSON text and the package
// wrapper parses them, so python sees exactly what the CLI writes to disk.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chainbound/generator.hpp"
#include "chainbound/gsc.hpp"
#include "chainbound/io.hpp"
#include "chainbound/solver.hpp"

namespace py = pybind11;
using namespace chainbound;

namespace {

SolverParams make_params(double time_limit, double mip_gap, int threads) {
    SolverParams p;
    p.time_limit = time_limit;
    p.mip_gap = mip_gap;
    p.threads = threads;
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "certified lower/upper bounds for supply-chain design MILPs";

    py::class_<GenConfig>(m, "Config")
        .def(py::init<>())
        .def_readwrite("nodes", &GenConfig::nodes)
        .def_readwrite("products", &GenConfig::products)
        .def_readwrite("technologies", &GenConfig::technologies)
        .def_readwrite("tech_density", &GenConfig::tech_density)
        .def_readwrite("radius", &GenConfig::radius)
        .def_readwrite("cost_per_distance", &GenConfig::cost_per_distance)
        .def_readwrite("ensure_profitable", &GenConfig::ensure_profitable)
        .def_readwrite("seed", &GenConfig::seed)
        .def_property(
            "edge_rule",
            [](const GenConfig& c) {
                return c.edge_rule == EdgeRule::all_pairs ? "all-pairs" : "radius";
            },
            [](GenConfig& c, const std::string& rule) {
                if (rule == "all-pairs")
                    c.edge_rule = EdgeRule::all_pairs;
                else if (rule == "radius")
                    c.edge_rule = EdgeRule::radius;
                else
                    throw py::value_error("edge_rule must be 'all-pairs' or 'radius'");
            });

    py::class_<SupplyChainInstance>(m, "Instance")
        .def_property_readonly("num_nodes", &SupplyChainInstance::num_nodes)
        .def_property_readonly("num_products", &SupplyChainInstance::num_products)
        .def_property_readonly("num_suppliers", &SupplyChainInstance::num_suppliers)
        .def_property_readonly("num_consumers", &SupplyChainInstance::num_consumers)
        .def_property_readonly("num_technologies", &SupplyChainInstance::num_technologies)
        .def_property_readonly("num_edges", &SupplyChainInstance::num_edges)
        .def_property_readonly("unique_edges", &SupplyChainInstance::unique_edges)
        .def("validate", [](const SupplyChainInstance& inst) {
            std::vector<std::string> out;
            for (const auto& v : validate_instance(inst)) out.push_back(v.entity + ": " + v.rule);
            return out;
        });

    py::class_<MilpProblem>(m, "Problem")
        .def_property_readonly("name", [](const MilpProblem& p) { return p.name; })
        .def_property_readonly("num_vars", &MilpProblem::num_vars)
        .def_property_readonly("num_rows", &MilpProblem::num_rows)
        .def("objective", [](const MilpProblem& p) { return p.objective; })
        .def("bounds",
             [](const MilpProblem& p) {
                 std::vector<double> lo, hi;
                 std::vector<int> integrality;
                 for (const auto& v : p.vars) {
                     lo.push_back(v.lower);
                     hi.push_back(v.upper);
                     integrality.push_back(v.kind == VarKind::integer ? 1 : 0);
                 }
                 return py::make_tuple(lo, hi, integrality);
             })
        .def("constraints",
             [](const MilpProblem& p) {
                 py::list rows;
                 for (const auto& r : p.rows) {
                     py::list terms;
                     for (const auto& t : r.terms) terms.append(py::make_tuple(t.var, t.coef));
                     const char* rel = r.rel == Relation::eq   ? "=="
                                       : r.rel == Relation::le ? "<="
                                                               : ">=";
                     rows.append(py::make_tuple(terms, rel, r.rhs));
                 }
                 return rows;
             })
        .def("lp_text", [](const MilpProblem& p) { return to_lp_string(p); })
        .def("__eq__", [](const MilpProblem& a, const MilpProblem& b) { return a == b; });

    m.def("generate", &generate, py::arg("config"));
    m.def("toy_config", &toy_config);
    m.def("formulate_full", &formulate_full, py::arg("instance"));
    m.def("write_bundle", &write_bundle, py::arg("instance"), py::arg("directory"));
    m.def("read_bundle", &read_bundle, py::arg("directory"));
    m.def("gap_percent", &gap_percent, py::arg("lb"), py::arg("ub"));
    m.def("format_gap", &format_gap, py::arg("percent"));

    m.def(
        "solve",
        [](const MilpProblem& prob, double time_limit, double mip_gap) {
            SolveResult res;
            {
                py::gil_scoped_release unlock;
                res = make_backend()->solve(prob, make_params(time_limit, mip_gap, 1));
            }
            py::dict d;
            d["status"] = std::string(to_string(res.status));
            if (res.objective) d["objective"] = *res.objective;
            if (res.best_bound) d["best_bound"] = *res.best_bound;
            d["mip_gap"] = res.mip_gap;
            d["values"] = res.values;
            d["wall_seconds"] = res.wall_seconds;
            return d;
        },
        py::arg("problem"), py::arg("time_limit") = 0.0, py::arg("mip_gap") = 0.0);

    m.def(
        "lower_bound_json",
        [](const SupplyChainInstance& inst, int edges, int draws, std::uint64_t seed,
           bool stratified, int threads, double time_limit, double mip_gap) {
            py::gil_scoped_release unlock;
            const auto run = lower_bound_run(inst, edges, draws, seed,
                                             make_params(time_limit, mip_gap, threads),
                                             stratified);
            return lower_run_to_json(run).dump();
        },
        py::arg("instance"), py::arg("edges"), py::arg("draws") = 1, py::arg("seed") = 0,
        py::arg("stratified") = false, py::arg("threads") = 1, py::arg("time_limit") = 0.0,
        py::arg("mip_gap") = 0.0);

    m.def(
        "upper_bound_json",
        [](const SupplyChainInstance& inst, int partitions, int trials, std::uint64_t seed,
           int threads, double time_limit, double mip_gap) {
            py::gil_scoped_release unlock;
            const auto run = upper_bound_run(inst, partitions, trials, seed,
                                             make_params(time_limit, mip_gap, threads));
            return upper_run_to_json(run).dump();
        },
        py::arg("instance"), py::arg("partitions"), py::arg("trials") = 1, py::arg("seed") = 0,
        py::arg("threads") = 1, py::arg("time_limit") = 0.0, py::arg("mip_gap") = 0.0);

    m.def(
        "run_gsc_json",
        [](const SupplyChainInstance& inst, const std::vector<std::tuple<int, int, int>>& raw,
           std::uint64_t seed, double gap_tol, bool stratified, int threads, double time_limit,
           double mip_gap) {
            std::vector<LevelSpec> levels;
            for (const auto& [a, c, w] : raw) levels.push_back({a, c, w});
            GscOptions opt;
            opt.seed = seed;
            opt.gap_tol_percent = gap_tol;
            opt.stratified = stratified;
            py::gil_scoped_release unlock;
            const auto rep =
                run_gsc(inst, levels, make_params(time_limit, mip_gap, threads), opt);
            return report_to_json(rep).dump();
        },
        py::arg("instance"), py::arg("levels"), py::arg("seed") = 0, py::arg("gap_tol") = 0.0,
        py::arg("stratified") = false, py::arg("threads") = 1, py::arg("time_limit") = 0.0,
        py::arg("mip_gap") = 0.0);
}
