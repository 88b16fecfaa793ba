#pragma once

#include <string>

#include "json.hpp"

#include "chainbound/gsc.hpp"

namespace chainbound {

inline constexpr int kBundleFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

// Shortest decimal text that parses back to exactly the same double; the
// bundle round-trip guarantee rests on this pair.
std::string format_double(double v);
double parse_double(const std::string& text);

// Instance bundle: a directory of comma-separated tables (nodes, products,
// suppliers, consumers, technologies, yields, edges) plus manifest.txt with
// the format version and the unique_edges flag.
void write_bundle(const SupplyChainInstance& inst, const std::string& dir);
SupplyChainInstance read_bundle(const std::string& dir);

// JSON views of the result types. Every timing field ends in "_seconds";
// stripping those keys makes two runs of the same provenance comparable
// byte for byte.
nlohmann::ordered_json to_json(const SampleStats& stats);
nlohmann::ordered_json to_json(const SolverParams& params);
nlohmann::ordered_json to_json(const Allocation& alloc);
Allocation allocation_from_json(const nlohmann::json& j);

nlohmann::ordered_json lower_run_to_json(const LowerBoundRun& run);
nlohmann::ordered_json upper_run_to_json(const UpperBoundRun& run);
nlohmann::ordered_json report_to_json(const BoundReport& report);

void write_json(const nlohmann::ordered_json& doc, const std::string& path);
nlohmann::json read_json(const std::string& path);

}  // namespace chainbound
