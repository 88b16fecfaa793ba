#include "chainbound/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace chainbound {
namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw std::runtime_error("format_double: value does not fit the buffer");
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::runtime_error("not a number: '" + text + "'");
    return v;
}

namespace {

int parse_int(const std::string& text) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::runtime_error("not an integer: '" + text + "'");
    return v;
}

void check_name(const std::string& name) {
    if (name.find_first_of(",\n\r") != std::string::npos)
        throw std::invalid_argument("names must not contain commas or line breaks: '" + name +
                                    "'");
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

// Rows of a comma-delimited table, header verified and stripped.
std::vector<std::vector<std::string>> read_table(const fs::path& path,
                                                 const std::string& header, int columns) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("missing table " + path.string());
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty table " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header)
        throw std::runtime_error(path.string() + ": expected header '" + header + "', got '" +
                                 line + "'");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            cells.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (static_cast<int>(cells.size()) != columns)
            throw std::runtime_error(path.string() + ": row '" + line + "' has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(columns));
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

void write_bundle(const SupplyChainInstance& inst, const std::string& dir) {
    const fs::path root(dir);
    fs::create_directories(root);

    {
        auto os = open_out(root / "manifest.txt");
        os << "format_version=" << kBundleFormatVersion << "\n";
        os << "unique_edges=" << (inst.unique_edges() ? "true" : "false") << "\n";
    }
    {
        auto os = open_out(root / "nodes.csv");
        os << "id,x,y\n";
        for (const auto& n : inst.nodes())
            os << n.id << ',' << format_double(n.x) << ',' << format_double(n.y) << '\n';
    }
    {
        auto os = open_out(root / "products.csv");
        os << "id,name\n";
        for (const auto& p : inst.products()) {
            check_name(p.name);
            os << p.id << ',' << p.name << '\n';
        }
    }
    {
        auto os = open_out(root / "suppliers.csv");
        os << "id,node,product,capacity,cost\n";
        for (const auto& s : inst.suppliers())
            os << s.id << ',' << s.node << ',' << s.product << ',' << format_double(s.capacity)
               << ',' << format_double(s.cost) << '\n';
    }
    {
        auto os = open_out(root / "consumers.csv");
        os << "id,node,product,capacity,value\n";
        for (const auto& c : inst.consumers())
            os << c.id << ',' << c.node << ',' << c.product << ',' << format_double(c.capacity)
               << ',' << format_double(c.value) << '\n';
    }
    {
        auto os = open_out(root / "technologies.csv");
        os << "id,node,ref_product,unit_capacity,max_facilities,op_cost,install_cost\n";
        for (const auto& t : inst.technologies())
            os << t.id << ',' << t.node << ',' << t.ref_product << ','
               << format_double(t.unit_capacity) << ',' << t.max_facilities << ','
               << format_double(t.op_cost) << ',' << format_double(t.install_cost) << '\n';
    }
    {
        auto os = open_out(root / "yields.csv");
        os << "tech,product,gamma\n";
        for (const auto& t : inst.technologies())
            for (const auto& [p, gamma] : t.yields)
                os << t.id << ',' << p << ',' << format_double(gamma) << '\n';
    }
    {
        auto os = open_out(root / "edges.csv");
        os << "id,src,dst,product,capacity,cost\n";
        for (const auto& e : inst.edges())
            os << e.id << ',' << e.src << ',' << e.dst << ',' << e.product << ','
               << format_double(e.capacity) << ',' << format_double(e.cost) << '\n';
    }
}

SupplyChainInstance read_bundle(const std::string& dir) {
    const fs::path root(dir);
    if (!fs::is_directory(root))
        throw std::runtime_error("instance bundle is not a directory: " + dir);

    int version = -1;
    bool unique_edges = false;
    {
        std::ifstream is(root / "manifest.txt");
        if (!is) throw std::runtime_error("missing manifest " + (root / "manifest.txt").string());
        std::string line;
        while (std::getline(is, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.rfind("format_version=", 0) == 0)
                version = parse_int(line.substr(15));
            else if (line.rfind("unique_edges=", 0) == 0)
                unique_edges = line.substr(13) == "true";
        }
        if (version != kBundleFormatVersion)
            throw std::runtime_error("unsupported bundle format version " +
                                     std::to_string(version));
    }

    std::vector<NodeSite> nodes;
    for (const auto& r : read_table(root / "nodes.csv", "id,x,y", 3))
        nodes.push_back({parse_int(r[0]), parse_double(r[1]), parse_double(r[2])});

    std::vector<Product> products;
    for (const auto& r : read_table(root / "products.csv", "id,name", 2))
        products.push_back({parse_int(r[0]), r[1]});

    std::vector<Supplier> suppliers;
    for (const auto& r :
         read_table(root / "suppliers.csv", "id,node,product,capacity,cost", 5))
        suppliers.push_back({parse_int(r[0]), parse_int(r[1]), parse_int(r[2]),
                             parse_double(r[3]), parse_double(r[4])});

    std::vector<Consumer> consumers;
    for (const auto& r :
         read_table(root / "consumers.csv", "id,node,product,capacity,value", 5))
        consumers.push_back({parse_int(r[0]), parse_int(r[1]), parse_int(r[2]),
                             parse_double(r[3]), parse_double(r[4])});

    std::vector<Technology> technologies;
    for (const auto& r : read_table(
             root / "technologies.csv",
             "id,node,ref_product,unit_capacity,max_facilities,op_cost,install_cost", 7)) {
        Technology t;
        t.id = parse_int(r[0]);
        t.node = parse_int(r[1]);
        t.ref_product = parse_int(r[2]);
        t.unit_capacity = parse_double(r[3]);
        t.max_facilities = parse_int(r[4]);
        t.op_cost = parse_double(r[5]);
        t.install_cost = parse_double(r[6]);
        technologies.push_back(std::move(t));
    }
    for (const auto& r : read_table(root / "yields.csv", "tech,product,gamma", 3)) {
        const int tech = parse_int(r[0]);
        if (tech < 0 || tech >= static_cast<int>(technologies.size()))
            throw std::runtime_error("yields.csv refers to unknown technology " + r[0]);
        technologies[tech].yields[parse_int(r[1])] = parse_double(r[2]);
    }

    std::vector<TransportEdge> edges;
    for (const auto& r :
         read_table(root / "edges.csv", "id,src,dst,product,capacity,cost", 6))
        edges.push_back({parse_int(r[0]), parse_int(r[1]), parse_int(r[2]), parse_int(r[3]),
                         parse_double(r[4]), parse_double(r[5])});

    return SupplyChainInstance(std::move(products), std::move(nodes), std::move(suppliers),
                               std::move(consumers), std::move(technologies), std::move(edges),
                               unique_edges);
}

nlohmann::ordered_json to_json(const SampleStats& stats) {
    return {{"n", stats.n}, {"mean", stats.mean}, {"sd", stats.sd}, {"ci95", stats.ci95}};
}

nlohmann::ordered_json to_json(const SolverParams& params) {
    return {{"time_limit", params.time_limit},
            {"mip_gap", params.mip_gap},
            {"threads", params.threads},
            {"seed", params.seed}};
}

nlohmann::ordered_json to_json(const Allocation& alloc) {
    return {{"supply", alloc.supply}, {"demand", alloc.demand},   {"flow", alloc.flow},
            {"process", alloc.process}, {"built", alloc.built},   {"welfare", alloc.welfare}};
}

Allocation allocation_from_json(const nlohmann::json& j) {
    Allocation a;
    a.supply = j.at("supply").get<std::vector<double>>();
    a.demand = j.at("demand").get<std::vector<double>>();
    a.flow = j.at("flow").get<std::vector<double>>();
    a.process = j.at("process").get<std::vector<double>>();
    a.built = j.at("built").get<std::vector<int>>();
    a.welfare = j.at("welfare").get<double>();
    return a;
}

nlohmann::ordered_json lower_run_to_json(const LowerBoundRun& run) {
    nlohmann::ordered_json draws = nlohmann::ordered_json::array();
    double total_seconds = 0.0;
    for (const auto& r : run.results) {
        nlohmann::ordered_json d{{"draw", r.draw}, {"seed", r.seed}, {"solved", r.solved}};
        if (r.solved)
            d["welfare"] = r.welfare;
        else
            d["failure"] = r.failure;
        d["wall_seconds"] = r.wall_seconds;
        draws.push_back(std::move(d));
        total_seconds += r.wall_seconds;
    }
    return {{"edges", run.sample_size},
            {"draws", run.draws},
            {"stratified", run.stratified},
            {"best_lb", run.best_welfare},
            {"best_draw", run.best_draw},
            {"stats", to_json(run.welfare_stats)},
            {"avg_solve_seconds", run.draws > 0 ? total_seconds / run.draws : 0.0},
            {"results", std::move(draws)}};
}

nlohmann::ordered_json upper_run_to_json(const UpperBoundRun& run) {
    nlohmann::ordered_json trials = nlohmann::ordered_json::array();
    double total_seconds = 0.0;
    for (const auto& r : run.results) {
        nlohmann::ordered_json t{{"trial", r.trial}, {"seed", r.seed}, {"solved", r.solved}};
        if (r.solved)
            t["bound"] = r.bound;
        else
            t["failure"] = r.failure;
        t["wall_seconds"] = r.wall_seconds;
        trials.push_back(std::move(t));
        total_seconds += r.wall_seconds;
    }
    return {{"partitions", run.partitions},
            {"trials", run.trials},
            {"best_ub", run.best_bound},
            {"best_trial", run.best_trial},
            {"stats", to_json(run.bound_stats)},
            {"avg_solve_seconds", run.trials > 0 ? total_seconds / run.trials : 0.0},
            {"results", std::move(trials)}};
}

nlohmann::ordered_json report_to_json(const BoundReport& report) {
    nlohmann::ordered_json levels = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const LevelOutcome& lv = report.levels[i];
        levels.push_back({{"level", i + 1},
                          {"edges", lv.spec.edges},
                          {"partitions", lv.spec.partitions},
                          {"draws", lv.spec.draws},
                          {"lb", lower_run_to_json(lv.lower)},
                          {"ub", upper_run_to_json(lv.upper)},
                          {"best_lb", lv.best_lb},
                          {"best_ub", lv.best_ub},
                          {"gap_percent", lv.gap_percent},
                          {"gap", format_gap(lv.gap_percent)},
                          {"lb_wall_seconds", lv.lb_wall_seconds},
                          {"ub_wall_seconds", lv.ub_wall_seconds}});
    }
    nlohmann::ordered_json provenance{
        {"seed", report.seed},
        {"gap_tol_percent", report.gap_tol_percent},
        {"stratified", report.stratified},
        {"solver", to_json(report.params)},
    };
    return {{"format_version", kReportFormatVersion},
            {"kind", "gsc_report"},
            {"provenance", std::move(provenance)},
            {"levels", std::move(levels)},
            {"best_lb", report.best_lb},
            {"best_ub", report.best_ub},
            {"gap_percent", report.gap_percent},
            {"gap", format_gap(report.gap_percent)},
            {"stopped_early", report.stopped_early},
            {"best_allocation_level", report.best_allocation_level},
            {"best_allocation", to_json(report.best_allocation)},
            {"total_lb_seconds", report.total_lb_seconds},
            {"total_ub_seconds", report.total_ub_seconds}};
}

void write_json(const nlohmann::ordered_json& doc, const std::string& path) {
    auto os = open_out(path);
    os << doc.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    is >> j;
    return j;
}

}  // namespace chainbound
