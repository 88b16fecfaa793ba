#pragma once

#include <cstdint>

#include "chainbound/model.hpp"

namespace chainbound {

struct ValueRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct CountRange {
    int lo = 0;
    int hi = 0;
};

enum class EdgeRule {
    all_pairs,  // every ordered node pair, per product
    radius,     // only pairs within `radius` of each other
};

// Knobs for synthetic instances. Coordinates land in the unit square; edge
// cost is a per-product base plus cost_per_distance times the Euclidean
// distance, so geography matters exactly as much as the config says.
struct GenConfig {
    int nodes = 10;
    int products = 1;
    int technologies = 0;     // conversion types along the product chain
    double tech_density = 0.3;  // fraction of nodes hosting each type

    CountRange suppliers_per_product{2, 4};  // raw product only
    CountRange consumers_per_product{2, 4};  // every product
    ValueRange supply_cost{1.0, 4.0};
    ValueRange supply_capacity{20.0, 60.0};
    ValueRange consumer_value{6.0, 12.0};
    ValueRange consumer_capacity{10.0, 40.0};

    EdgeRule edge_rule = EdgeRule::all_pairs;
    double radius = 0.5;  // used by the radius rule only
    ValueRange edge_capacity{15.0, 50.0};
    ValueRange edge_cost_base{0.2, 0.8};  // drawn once per product
    double cost_per_distance = 2.0;

    ValueRange tech_unit_capacity{10.0, 30.0};
    CountRange tech_max_facilities{1, 3};
    ValueRange tech_op_cost{0.2, 1.0};
    ValueRange tech_install_cost{5.0, 20.0};
    ValueRange tech_yield{0.4, 0.9};  // output units per unit of input

    // Self-loop transfers are rejected by instance validation (they cancel
    // in the nodal balance), so enabling this flag is a config error; it
    // exists to make the edge-count convention explicit.
    bool include_self_loops = false;

    // Plant one route whose consumer outbids the supply and transport cost,
    // so the optimum is strictly positive and bound tests never collapse to
    // comparing zeros.
    bool ensure_profitable = true;

    std::uint64_t seed = 0;
};

// Deterministic in the whole config including the seed. The result always
// passes validate_instance and carries unique_edges = true.
SupplyChainInstance generate(const GenConfig& cfg);

// Two nodes, one supplier, one consumer, fixed costs; direct solve gives a
// welfare of exactly 35 (7 units at margin 5). Handy as a smoke fixture.
GenConfig toy_config();

}  // namespace chainbound
