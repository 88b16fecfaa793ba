#pragma once

#include "chainbound/model.hpp"

namespace chainbound::testing {

// Single supplier -> edge -> consumer. Optimum is fully determined by the
// edge capacity: ship 6 units, welfare 6*5 - 6*1 - 6*1 = 18.
inline SupplyChainInstance link_instance() {
    std::vector<Product> products{{0, "p0"}};
    std::vector<NodeSite> nodes{{0, 0.0, 0.0}, {1, 3.0, 4.0}};
    std::vector<Supplier> suppliers{{0, 0, 0, 10.0, 1.0}};
    std::vector<Consumer> consumers{{0, 1, 0, 8.0, 5.0}};
    std::vector<Technology> technologies;
    std::vector<TransportEdge> edges{{0, 0, 1, 0, 6.0, 1.0}};
    return SupplyChainInstance(std::move(products), std::move(nodes), std::move(suppliers),
                               std::move(consumers), std::move(technologies), std::move(edges),
                               /*unique_edges=*/true);
}

// Conversion chain whose integer optimum differs from its LP relaxation.
// Raw p0 is bought at node 0, converted to p1 (yield 0.5) and shipped to a
// consumer at node 1. With throughput z and build count y they satisfy
// z <= 4y, z <= 10 (supply), y <= 3, and welfare works out to 3z - 2y.
// Enumerating y: y=3 gives z=10, welfare 24 (the integer optimum);
// the relaxation sits at y=2.5, z=10, welfare 25.
inline SupplyChainInstance chain_instance() {
    std::vector<Product> products{{0, "raw"}, {1, "refined"}};
    std::vector<NodeSite> nodes{{0, 0.0, 0.0}, {1, 3.0, 4.0}};
    std::vector<Supplier> suppliers{{0, 0, 0, 10.0, 1.0}};
    std::vector<Consumer> consumers{{0, 1, 1, 8.0, 10.0}};
    std::vector<Technology> technologies{
        {0, 0, 0, {{0, -1.0}, {1, 0.5}}, 4.0, 3, 0.5, 2.0}};
    std::vector<TransportEdge> edges{{0, 0, 1, 1, 10.0, 1.0}};
    return SupplyChainInstance(std::move(products), std::move(nodes), std::move(suppliers),
                               std::move(consumers), std::move(technologies), std::move(edges),
                               /*unique_edges=*/true);
}

}  // namespace chainbound::testing
