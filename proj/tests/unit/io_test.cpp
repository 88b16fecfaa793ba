#include "chainbound/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "chainbound/generator.hpp"
#include "chainbound/solver.hpp"
#include "doctest.h"

using namespace chainbound;
namespace fs = std::filesystem;

namespace {

// Scratch directory that cleans up after itself.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("chainbound_io_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

void expect_same(const SupplyChainInstance& a, const SupplyChainInstance& b) {
    REQUIRE(a.num_nodes() == b.num_nodes());
    REQUIRE(a.num_products() == b.num_products());
    REQUIRE(a.num_suppliers() == b.num_suppliers());
    REQUIRE(a.num_consumers() == b.num_consumers());
    REQUIRE(a.num_technologies() == b.num_technologies());
    REQUIRE(a.num_edges() == b.num_edges());
    CHECK(a.unique_edges() == b.unique_edges());
    for (int i = 0; i < a.num_nodes(); ++i) {
        CHECK(a.nodes()[i].x == b.nodes()[i].x);  // bit-exact, not approx
        CHECK(a.nodes()[i].y == b.nodes()[i].y);
    }
    for (int i = 0; i < a.num_products(); ++i)
        CHECK(a.products()[i].name == b.products()[i].name);
    for (int i = 0; i < a.num_suppliers(); ++i) {
        CHECK(a.suppliers()[i].node == b.suppliers()[i].node);
        CHECK(a.suppliers()[i].product == b.suppliers()[i].product);
        CHECK(a.suppliers()[i].capacity == b.suppliers()[i].capacity);
        CHECK(a.suppliers()[i].cost == b.suppliers()[i].cost);
    }
    for (int i = 0; i < a.num_consumers(); ++i) {
        CHECK(a.consumers()[i].node == b.consumers()[i].node);
        CHECK(a.consumers()[i].capacity == b.consumers()[i].capacity);
        CHECK(a.consumers()[i].value == b.consumers()[i].value);
    }
    for (int i = 0; i < a.num_technologies(); ++i) {
        const auto& ta = a.technologies()[i];
        const auto& tb = b.technologies()[i];
        CHECK(ta.node == tb.node);
        CHECK(ta.ref_product == tb.ref_product);
        CHECK(ta.yields == tb.yields);
        CHECK(ta.unit_capacity == tb.unit_capacity);
        CHECK(ta.max_facilities == tb.max_facilities);
        CHECK(ta.op_cost == tb.op_cost);
        CHECK(ta.install_cost == tb.install_cost);
    }
    for (int i = 0; i < a.num_edges(); ++i) {
        CHECK(a.edges()[i].src == b.edges()[i].src);
        CHECK(a.edges()[i].dst == b.edges()[i].dst);
        CHECK(a.edges()[i].product == b.edges()[i].product);
        CHECK(a.edges()[i].capacity == b.edges()[i].capacity);
        CHECK(a.edges()[i].cost == b.edges()[i].cost);
    }
}

}  // namespace

TEST_CASE("double text is shortest and round-trips exactly") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.5) == "-2.5");

    std::mt19937_64 mt(99);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(mt);
        CHECK(parse_double(format_double(v)) == v);
    }
    // a few values that defeat %.17g-free naive printers
    for (double v : {1.0 / 3.0, 1e-300, 1e300, 5e-324, 0.30000000000000004})
        CHECK(parse_double(format_double(v)) == v);

    CHECK_THROWS(parse_double("12,5"));
    CHECK_THROWS(parse_double(""));
    CHECK_THROWS(parse_double("3.1x"));
}

TEST_CASE("bundle write/read reproduces the instance field for field") {
    GenConfig cfg;
    cfg.nodes = 9;
    cfg.products = 2;
    cfg.technologies = 2;
    cfg.seed = 1234;
    const auto inst = generate(cfg);

    TempDir dir("roundtrip");
    write_bundle(inst, dir.str());
    const auto back = read_bundle(dir.str());
    expect_same(inst, back);
    CHECK(validate_instance(back).empty());
    // the MILP views must be identical, which is what solvers consume
    CHECK(formulate_full(inst) == formulate_full(back));
}

TEST_CASE("toy bundle survives the round trip too") {
    const auto inst = generate(toy_config());
    TempDir dir("toy");
    write_bundle(inst, dir.str());
    expect_same(inst, read_bundle(dir.str()));
}

TEST_CASE("broken bundles are rejected with a pointed message") {
    const auto inst = generate(toy_config());
    TempDir dir("broken");
    write_bundle(inst, dir.str());

    SUBCASE("missing directory") { CHECK_THROWS(read_bundle(dir.str() + "_nope")); }
    SUBCASE("missing table") {
        fs::remove(dir.path / "edges.csv");
        CHECK_THROWS_WITH_AS(read_bundle(dir.str()), doctest::Contains("edges.csv"),
                             std::runtime_error);
    }
    SUBCASE("wrong manifest version") {
        std::ofstream(dir.path / "manifest.txt") << "format_version=42\nunique_edges=true\n";
        CHECK_THROWS_WITH_AS(read_bundle(dir.str()), doctest::Contains("version"),
                             std::runtime_error);
    }
    SUBCASE("tampered header") {
        std::ofstream(dir.path / "nodes.csv") << "id,lon,lat\n0,0,0\n";
        CHECK_THROWS_WITH_AS(read_bundle(dir.str()), doctest::Contains("header"),
                             std::runtime_error);
    }
    SUBCASE("short row") {
        std::ofstream(dir.path / "nodes.csv") << "id,x,y\n0,0.5\n";
        CHECK_THROWS(read_bundle(dir.str()));
    }
    SUBCASE("garbage number") {
        std::ofstream(dir.path / "nodes.csv") << "id,x,y\n0,zero,0\n";
        CHECK_THROWS(read_bundle(dir.str()));
    }
}

TEST_CASE("allocation JSON round-trips") {
    Allocation a = Allocation::zeros(2, 1, 3, 1);
    a.supply = {1.5, 0.25};
    a.demand = {1.75};
    a.flow = {0.5, 0.0, 1.25};
    a.process = {2.0};
    a.built = {1};
    a.welfare = 12.375;
    const auto j = to_json(a);
    const Allocation b = allocation_from_json(j);
    CHECK(b.supply == a.supply);
    CHECK(b.demand == a.demand);
    CHECK(b.flow == a.flow);
    CHECK(b.process == a.process);
    CHECK(b.built == a.built);
    CHECK(b.welfare == a.welfare);
}

namespace {

// every key mentioning wall time must follow the _seconds convention so a
// determinism check can strip timing in one pass
void check_seconds_keys(const nlohmann::json& j) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& k = it.key();
            if (k.find("second") != std::string::npos)
                CHECK_MESSAGE((k.size() >= 8 && k.substr(k.size() - 8) == "_seconds"),
                              "bad timing key: " << k);
            check_seconds_keys(it.value());
        }
    } else if (j.is_array()) {
        for (const auto& e : j) check_seconds_keys(e);
    }
}

nlohmann::json strip_seconds(const nlohmann::json& j) {
    if (j.is_object()) {
        nlohmann::json out = nlohmann::json::object();
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& k = it.key();
            if (k.size() >= 8 && k.substr(k.size() - 8) == "_seconds") continue;
            out[k] = strip_seconds(it.value());
        }
        return out;
    }
    if (j.is_array()) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& e : j) out.push_back(strip_seconds(e));
        return out;
    }
    return j;
}

}  // namespace

TEST_CASE("report JSON carries the table columns and recomputable gap") {
    GenConfig cfg;
    cfg.nodes = 6;
    cfg.products = 1;
    cfg.seed = 21;
    const auto inst = generate(cfg);
    const std::vector<LevelSpec> levels{{8, 2, 3}, {inst.num_edges(), inst.num_nodes(), 1}};
    GscOptions opt;
    opt.seed = 5;
    const auto report = run_gsc(inst, levels, {}, opt);

    const auto doc = report_to_json(report);
    CHECK(doc.at("format_version") == kReportFormatVersion);
    CHECK(doc.at("kind") == "gsc_report");
    REQUIRE(doc.at("levels").size() == 2);
    for (const auto& lv : doc.at("levels")) {
        // one row per level with the summary-table columns
        CHECK(lv.contains("edges"));
        CHECK(lv.contains("partitions"));
        CHECK(lv.at("lb").contains("best_lb"));
        CHECK(lv.at("lb").contains("stats"));
        CHECK(lv.at("lb").contains("avg_solve_seconds"));
        CHECK(lv.at("ub").contains("best_ub"));
        CHECK(lv.at("ub").contains("stats"));
        const double lb = lv.at("best_lb").get<double>();
        const double ub = lv.at("best_ub").get<double>();
        CHECK(lv.at("gap_percent").get<double>() == doctest::Approx(gap_percent(lb, ub)));
        CHECK(lv.at("gap").get<std::string>() ==
              format_gap(lv.at("gap_percent").get<double>()));
    }
    CHECK(doc.at("gap_percent").get<double>() ==
          doctest::Approx(gap_percent(doc.at("best_lb").get<double>(),
                                      doc.at("best_ub").get<double>())));
    CHECK(doc.at("provenance").at("seed") == 5);
    check_seconds_keys(doc);

    // same provenance, second run: identical after stripping timing
    const auto again = report_to_json(run_gsc(inst, levels, {}, opt));
    CHECK(strip_seconds(doc) == strip_seconds(again));

    // write/read through a file preserves the document
    TempDir dir("report");
    const auto path = (dir.path / "report.json").string();
    write_json(doc, path);
    CHECK(strip_seconds(read_json(path)) == strip_seconds(doc));
}
