#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace chainbound {

// Problem data for a multi-product supply-chain design instance: spatial
// nodes, products, suppliers, consumers, conversion technologies, and
// directed transport edges. Ids are dense integer indexes; names are
// metadata only.

struct Product {
    int id = 0;
    std::string name;
};

struct NodeSite {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
};

struct Supplier {
    int id = 0;
    int node = 0;
    int product = 0;
    double capacity = 0.0;  // max supply flow
    double cost = 0.0;      // per unit supplied
};

struct Consumer {
    int id = 0;
    int node = 0;
    int product = 0;
    double capacity = 0.0;  // max demand flow
    double value = 0.0;     // bid per unit served
};

struct Technology {
    int id = 0;
    int node = 0;
    int ref_product = 0;
    // product -> units generated (+) or consumed (-) per unit of reference
    // product processed; absent means neither.
    std::map<int, double> yields;
    double unit_capacity = 0.0;  // ref-product flow per installed facility
    int max_facilities = 0;
    double op_cost = 0.0;       // per unit processed
    double install_cost = 0.0;  // per facility built
};

struct TransportEdge {
    int id = 0;
    int src = 0;
    int dst = 0;
    int product = 0;
    double capacity = 0.0;
    double cost = 0.0;  // per unit shipped
};

// Candidate decision vector. Continuous fields are per-entity flows; y is
// the installed facility count per technology.
struct Allocation {
    std::vector<double> supply;   // per supplier
    std::vector<double> demand;   // per consumer
    std::vector<double> flow;     // per edge
    std::vector<double> process;  // per technology (ref-product throughput)
    std::vector<int> built;       // per technology (facility count)
    double welfare = 0.0;

    static Allocation zeros(int suppliers, int consumers, int edges, int technologies);
};

struct Violation {
    std::string entity;  // e.g. "edge 7"
    std::string rule;
};

// Immutable after construction; index tables are built once and the
// instance is safe to share across threads.
class SupplyChainInstance {
public:
    SupplyChainInstance() = default;
    SupplyChainInstance(std::vector<Product> products, std::vector<NodeSite> nodes,
                        std::vector<Supplier> suppliers, std::vector<Consumer> consumers,
                        std::vector<Technology> technologies, std::vector<TransportEdge> edges,
                        bool unique_edges);

    const std::vector<Product>& products() const { return products_; }
    const std::vector<NodeSite>& nodes() const { return nodes_; }
    const std::vector<Supplier>& suppliers() const { return suppliers_; }
    const std::vector<Consumer>& consumers() const { return consumers_; }
    const std::vector<Technology>& technologies() const { return technologies_; }
    const std::vector<TransportEdge>& edges() const { return edges_; }
    bool unique_edges() const { return unique_edges_; }

    int num_products() const { return static_cast<int>(products_.size()); }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_suppliers() const { return static_cast<int>(suppliers_.size()); }
    int num_consumers() const { return static_cast<int>(consumers_.size()); }
    int num_technologies() const { return static_cast<int>(technologies_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    // Index tables (entity ids, sorted ascending).
    std::span<const int> suppliers_at(int node, int product) const;
    std::span<const int> consumers_at(int node, int product) const;
    std::span<const int> technologies_at(int node) const;
    std::span<const int> edges_in(int node, int product) const;
    std::span<const int> edges_out(int node, int product) const;

    double distance(int node_a, int node_b) const;

private:
    struct Buckets {
        std::vector<int> offsets;  // size num_buckets + 1
        std::vector<int> ids;
        std::span<const int> at(int bucket) const {
            return std::span<const int>(ids).subspan(offsets[bucket],
                                                     offsets[bucket + 1] - offsets[bucket]);
        }
    };

    int bucket(int node, int product) const { return node * num_products() + product; }
    void build_indexes();

    std::vector<Product> products_;
    std::vector<NodeSite> nodes_;
    std::vector<Supplier> suppliers_;
    std::vector<Consumer> consumers_;
    std::vector<Technology> technologies_;
    std::vector<TransportEdge> edges_;
    bool unique_edges_ = false;

    Buckets suppliers_by_np_;
    Buckets consumers_by_np_;
    Buckets technologies_by_n_;
    Buckets edges_in_by_np_;
    Buckets edges_out_by_np_;
};

// Empty result means every type invariant holds. Violations are data, not
// failures: malformed instances are reported, never thrown.
std::vector<Violation> validate_instance(const SupplyChainInstance& inst);

// Total welfare: demand value served minus supply, transport, processing
// and installation costs.
double evaluate_welfare(const SupplyChainInstance& inst, const Allocation& alloc);

struct ConstraintResidual {
    std::string constraint;  // e.g. "balance node 3 product 0"
    double residual = 0.0;
};

struct FeasibilityReport {
    bool feasible = true;
    double max_balance_residual = 0.0;
    std::vector<ConstraintResidual> violations;
};

// Checks nodal product balances, capacity bounds, and the processing/build
// link. Balance residuals are accepted up to tol * (1 + inflow magnitude at
// the node), so solver noise on large flows does not flag false negatives.
FeasibilityReport check_feasibility(const SupplyChainInstance& inst, const Allocation& alloc,
                                    double tol = 1e-6);

}  // namespace chainbound
