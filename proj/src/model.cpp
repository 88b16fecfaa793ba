#include "chainbound/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace chainbound {
namespace {

void fill_buckets(auto& buckets, int num_buckets, auto&& bucket_of, int count) {
    buckets.offsets.assign(num_buckets + 1, 0);
    for (int id = 0; id < count; ++id) ++buckets.offsets[bucket_of(id) + 1];
    for (int b = 0; b < num_buckets; ++b) buckets.offsets[b + 1] += buckets.offsets[b];
    buckets.ids.resize(count);
    std::vector<int> cursor(buckets.offsets.begin(), buckets.offsets.end() - 1);
    for (int id = 0; id < count; ++id) buckets.ids[cursor[bucket_of(id)]++] = id;
    // ids arrive in increasing order, so each bucket is already sorted
}

std::string entity(const char* kind, int id) { return std::string(kind) + " " + std::to_string(id); }

}  // namespace

Allocation Allocation::zeros(int suppliers, int consumers, int edges, int technologies) {
    Allocation a;
    a.supply.assign(suppliers, 0.0);
    a.demand.assign(consumers, 0.0);
    a.flow.assign(edges, 0.0);
    a.process.assign(technologies, 0.0);
    a.built.assign(technologies, 0);
    a.welfare = 0.0;
    return a;
}

SupplyChainInstance::SupplyChainInstance(std::vector<Product> products, std::vector<NodeSite> nodes,
                                         std::vector<Supplier> suppliers,
                                         std::vector<Consumer> consumers,
                                         std::vector<Technology> technologies,
                                         std::vector<TransportEdge> edges, bool unique_edges)
    : products_(std::move(products)),
      nodes_(std::move(nodes)),
      suppliers_(std::move(suppliers)),
      consumers_(std::move(consumers)),
      technologies_(std::move(technologies)),
      edges_(std::move(edges)),
      unique_edges_(unique_edges) {
    build_indexes();
}

void SupplyChainInstance::build_indexes() {
    const int np = num_nodes() * num_products();
    auto in_range = [&](int node, int product) {
        return node >= 0 && node < num_nodes() && product >= 0 && product < num_products();
    };
    // Entities with out-of-range node/product ids are parked in bucket 0 so
    // that construction never faults; validate_instance reports them.
    auto np_bucket = [&](int node, int product) { return in_range(node, product) ? bucket(node, product) : 0; };

    fill_buckets(suppliers_by_np_, std::max(np, 1),
                 [&](int i) { return np_bucket(suppliers_[i].node, suppliers_[i].product); },
                 num_suppliers());
    fill_buckets(consumers_by_np_, std::max(np, 1),
                 [&](int j) { return np_bucket(consumers_[j].node, consumers_[j].product); },
                 num_consumers());
    fill_buckets(technologies_by_n_, std::max(num_nodes(), 1),
                 [&](int t) {
                     const int n = technologies_[t].node;
                     return (n >= 0 && n < num_nodes()) ? n : 0;
                 },
                 num_technologies());
    fill_buckets(edges_in_by_np_, std::max(np, 1),
                 [&](int l) { return np_bucket(edges_[l].dst, edges_[l].product); }, num_edges());
    fill_buckets(edges_out_by_np_, std::max(np, 1),
                 [&](int l) { return np_bucket(edges_[l].src, edges_[l].product); }, num_edges());
}

std::span<const int> SupplyChainInstance::suppliers_at(int node, int product) const {
    return suppliers_by_np_.at(bucket(node, product));
}
std::span<const int> SupplyChainInstance::consumers_at(int node, int product) const {
    return consumers_by_np_.at(bucket(node, product));
}
std::span<const int> SupplyChainInstance::technologies_at(int node) const {
    return technologies_by_n_.at(node);
}
std::span<const int> SupplyChainInstance::edges_in(int node, int product) const {
    return edges_in_by_np_.at(bucket(node, product));
}
std::span<const int> SupplyChainInstance::edges_out(int node, int product) const {
    return edges_out_by_np_.at(bucket(node, product));
}

double SupplyChainInstance::distance(int node_a, int node_b) const {
    const NodeSite& a = nodes_[node_a];
    const NodeSite& b = nodes_[node_b];
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<Violation> validate_instance(const SupplyChainInstance& inst) {
    std::vector<Violation> out;
    auto add = [&](std::string who, std::string rule) {
        out.push_back({std::move(who), std::move(rule)});
    };

    const int P = inst.num_products();
    const int N = inst.num_nodes();
    auto check_ids = [&](const auto& list, const char* kind) {
        for (int i = 0; i < static_cast<int>(list.size()); ++i)
            if (list[i].id != i) add(entity(kind, list[i].id), "ids must be dense and contiguous");
    };
    check_ids(inst.products(), "product");
    check_ids(inst.nodes(), "node");
    check_ids(inst.suppliers(), "supplier");
    check_ids(inst.consumers(), "consumer");
    check_ids(inst.technologies(), "technology");
    check_ids(inst.edges(), "edge");

    auto valid_node = [&](int n) { return n >= 0 && n < N; };
    auto valid_product = [&](int p) { return p >= 0 && p < P; };

    for (const Supplier& s : inst.suppliers()) {
        if (!valid_node(s.node)) add(entity("supplier", s.id), "node id out of range");
        if (!valid_product(s.product)) add(entity("supplier", s.id), "product id out of range");
        if (s.capacity < 0) add(entity("supplier", s.id), "negative capacity");
        if (s.cost < 0) add(entity("supplier", s.id), "negative cost");
    }
    for (const Consumer& c : inst.consumers()) {
        if (!valid_node(c.node)) add(entity("consumer", c.id), "node id out of range");
        if (!valid_product(c.product)) add(entity("consumer", c.id), "product id out of range");
        if (c.capacity < 0) add(entity("consumer", c.id), "negative capacity");
        if (c.value < 0) add(entity("consumer", c.id), "negative value");
    }
    for (const Technology& t : inst.technologies()) {
        if (!valid_node(t.node)) add(entity("technology", t.id), "node id out of range");
        if (!valid_product(t.ref_product)) {
            add(entity("technology", t.id), "reference product id out of range");
        } else {
            auto it = t.yields.find(t.ref_product);
            if (it == t.yields.end() || it->second == 0.0)
                add(entity("technology", t.id), "reference product yield must be nonzero");
        }
        for (const auto& [p, gamma] : t.yields) {
            (void)gamma;
            if (!valid_product(p)) add(entity("technology", t.id), "yield product id out of range");
        }
        if (t.unit_capacity < 0) add(entity("technology", t.id), "negative unit capacity");
        if (t.max_facilities < 0) add(entity("technology", t.id), "negative max facilities");
        if (t.op_cost < 0) add(entity("technology", t.id), "negative operating cost");
        if (t.install_cost < 0) add(entity("technology", t.id), "negative installation cost");
    }
    for (const TransportEdge& e : inst.edges()) {
        if (!valid_node(e.src)) add(entity("edge", e.id), "source node id out of range");
        if (!valid_node(e.dst)) add(entity("edge", e.id), "destination node id out of range");
        if (e.src == e.dst) add(entity("edge", e.id), "self-loop edge");
        if (!valid_product(e.product)) add(entity("edge", e.id), "product id out of range");
        if (e.capacity < 0) add(entity("edge", e.id), "negative capacity");
        if (e.cost < 0) add(entity("edge", e.id), "negative cost");
    }

    if (inst.unique_edges()) {
        std::set<std::tuple<int, int, int>> seen;
        for (const TransportEdge& e : inst.edges())
            if (!seen.insert({e.src, e.dst, e.product}).second)
                add(entity("edge", e.id), "duplicate (src, dst, product) under unique_edges");
    }

    // Cross-check the derived index tables against the attribute fields.
    if (out.empty()) {
        for (int n = 0; n < N; ++n) {
            for (int p = 0; p < P; ++p) {
                for (int i : inst.suppliers_at(n, p)) {
                    const Supplier& s = inst.suppliers()[i];
                    if (s.node != n || s.product != p)
                        add(entity("supplier", i), "index table inconsistent with attributes");
                }
                for (int j : inst.consumers_at(n, p)) {
                    const Consumer& c = inst.consumers()[j];
                    if (c.node != n || c.product != p)
                        add(entity("consumer", j), "index table inconsistent with attributes");
                }
                for (int l : inst.edges_in(n, p)) {
                    const TransportEdge& e = inst.edges()[l];
                    if (e.dst != n || e.product != p)
                        add(entity("edge", l), "in-edge table inconsistent with attributes");
                }
                for (int l : inst.edges_out(n, p)) {
                    const TransportEdge& e = inst.edges()[l];
                    if (e.src != n || e.product != p)
                        add(entity("edge", l), "out-edge table inconsistent with attributes");
                }
            }
            for (int t : inst.technologies_at(n))
                if (inst.technologies()[t].node != n)
                    add(entity("technology", t), "technology table inconsistent with attributes");
        }
    }
    return out;
}

namespace {

void require_dimensions(const SupplyChainInstance& inst, const Allocation& alloc) {
    if (static_cast<int>(alloc.supply.size()) != inst.num_suppliers() ||
        static_cast<int>(alloc.demand.size()) != inst.num_consumers() ||
        static_cast<int>(alloc.flow.size()) != inst.num_edges() ||
        static_cast<int>(alloc.process.size()) != inst.num_technologies() ||
        static_cast<int>(alloc.built.size()) != inst.num_technologies())
        throw std::invalid_argument("allocation dimensions do not match instance");
}

}  // namespace

double evaluate_welfare(const SupplyChainInstance& inst, const Allocation& alloc) {
    require_dimensions(inst, alloc);
    double value = 0.0;
    for (const Consumer& c : inst.consumers()) value += c.value * alloc.demand[c.id];
    for (const Supplier& s : inst.suppliers()) value -= s.cost * alloc.supply[s.id];
    for (const TransportEdge& e : inst.edges()) value -= e.cost * alloc.flow[e.id];
    for (const Technology& t : inst.technologies()) {
        value -= t.op_cost * alloc.process[t.id];
        value -= t.install_cost * alloc.built[t.id];
    }
    return value;
}

FeasibilityReport check_feasibility(const SupplyChainInstance& inst, const Allocation& alloc,
                                    double tol) {
    require_dimensions(inst, alloc);
    FeasibilityReport report;
    auto flag = [&](std::string what, double residual) {
        report.feasible = false;
        report.violations.push_back({std::move(what), residual});
    };
    auto check_range = [&](double v, double cap, const char* kind, int id) {
        const double slack = tol * (1.0 + std::abs(cap));
        if (v < -slack) flag(entity(kind, id) + " below zero", -v);
        if (v > cap + slack) flag(entity(kind, id) + " above capacity", v - cap);
    };

    for (const Supplier& s : inst.suppliers()) check_range(alloc.supply[s.id], s.capacity, "supply", s.id);
    for (const Consumer& c : inst.consumers()) check_range(alloc.demand[c.id], c.capacity, "demand", c.id);
    for (const TransportEdge& e : inst.edges()) check_range(alloc.flow[e.id], e.capacity, "flow", e.id);
    for (const Technology& t : inst.technologies()) {
        const int y = alloc.built[t.id];
        if (y < 0) flag(entity("built", t.id) + " below zero", -y);
        if (y > t.max_facilities) flag(entity("built", t.id) + " above max facilities", y - t.max_facilities);
        check_range(alloc.process[t.id], static_cast<double>(y) * t.unit_capacity, "process", t.id);
    }

    for (int n = 0; n < inst.num_nodes(); ++n) {
        for (int p = 0; p < inst.num_products(); ++p) {
            double inflow = 0.0, outflow = 0.0, converted = 0.0, converted_in = 0.0;
            for (int i : inst.suppliers_at(n, p)) inflow += alloc.supply[i];
            for (int l : inst.edges_in(n, p)) inflow += alloc.flow[l];
            for (int j : inst.consumers_at(n, p)) outflow += alloc.demand[j];
            for (int l : inst.edges_out(n, p)) outflow += alloc.flow[l];
            for (int t : inst.technologies_at(n)) {
                auto it = inst.technologies()[t].yields.find(p);
                if (it == inst.technologies()[t].yields.end()) continue;
                const double term = it->second * alloc.process[t];
                converted += term;
                if (term > 0) converted_in += term;
            }
            const double residual = inflow - outflow + converted;
            report.max_balance_residual = std::max(report.max_balance_residual, std::abs(residual));
            const double scale = inflow + converted_in;  // everything entering the node
            if (std::abs(residual) > tol * (1.0 + scale))
                flag("balance node " + std::to_string(n) + " product " + std::to_string(p), residual);
        }
    }
    return report;
}

}  // namespace chainbound
