#include "chainbound/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chainbound/rng.hpp"

namespace chainbound {
namespace {

void check_range(const ValueRange& r, const char* what) {
    if (r.lo < 0.0 || r.hi < r.lo)
        throw std::invalid_argument(std::string("generate: bad range for ") + what);
}

void check_count(const CountRange& r, const char* what) {
    if (r.lo < 0 || r.hi < r.lo)
        throw std::invalid_argument(std::string("generate: bad count range for ") + what);
}

void check_config(const GenConfig& cfg) {
    if (cfg.nodes < 1) throw std::invalid_argument("generate: need at least one node");
    if (cfg.products < 1) throw std::invalid_argument("generate: need at least one product");
    if (cfg.technologies < 0) throw std::invalid_argument("generate: negative technology count");
    if (cfg.tech_density < 0.0 || cfg.tech_density > 1.0)
        throw std::invalid_argument("generate: tech_density must lie in [0,1]");
    if (cfg.suppliers_per_product.lo < 1)
        throw std::invalid_argument("generate: need at least one supplier for the raw product");
    if (cfg.include_self_loops)
        throw std::invalid_argument(
            "generate: self-loop edges are rejected by instance validation (intra-node "
            "transfer is implicit in the nodal balance); leave include_self_loops off");
    if (cfg.edge_rule == EdgeRule::radius && cfg.radius <= 0.0)
        throw std::invalid_argument("generate: radius rule needs a positive radius");
    if (cfg.cost_per_distance < 0.0)
        throw std::invalid_argument("generate: negative cost_per_distance");
    check_count(cfg.suppliers_per_product, "suppliers_per_product");
    check_count(cfg.consumers_per_product, "consumers_per_product");
    check_count(cfg.tech_max_facilities, "tech_max_facilities");
    if (cfg.tech_max_facilities.lo < 1 && cfg.technologies > 0)
        throw std::invalid_argument("generate: technologies need max_facilities >= 1");
    check_range(cfg.supply_cost, "supply_cost");
    check_range(cfg.supply_capacity, "supply_capacity");
    check_range(cfg.consumer_value, "consumer_value");
    check_range(cfg.consumer_capacity, "consumer_capacity");
    check_range(cfg.edge_capacity, "edge_capacity");
    check_range(cfg.edge_cost_base, "edge_cost_base");
    check_range(cfg.tech_unit_capacity, "tech_unit_capacity");
    check_range(cfg.tech_op_cost, "tech_op_cost");
    check_range(cfg.tech_install_cost, "tech_install_cost");
    check_range(cfg.tech_yield, "tech_yield");
    if (cfg.tech_yield.hi <= 0.0 && cfg.technologies > 0 && cfg.products > 1)
        throw std::invalid_argument("generate: tech_yield must allow positive output");
}

double draw(Rng& rng, const ValueRange& r) { return r.lo == r.hi ? r.lo : rng.uniform(r.lo, r.hi); }
int draw(Rng& rng, const CountRange& r) { return rng.range(r.lo, r.hi); }

}  // namespace

SupplyChainInstance generate(const GenConfig& cfg) {
    check_config(cfg);
    Rng rng(cfg.seed);

    std::vector<Product> products(cfg.products);
    for (int p = 0; p < cfg.products; ++p) products[p] = {p, "p" + std::to_string(p)};

    std::vector<NodeSite> nodes(cfg.nodes);
    for (int n = 0; n < cfg.nodes; ++n) nodes[n] = {n, rng.uniform01(), rng.uniform01()};
    auto dist = [&](int a, int b) {
        const double dx = nodes[a].x - nodes[b].x;
        const double dy = nodes[a].y - nodes[b].y;
        return std::sqrt(dx * dx + dy * dy);
    };

    // suppliers sell the raw product only; consumers exist for every product
    // with values stepped up along the chain so conversion can pay for itself
    std::vector<Supplier> suppliers;
    const int n_sup = draw(rng, cfg.suppliers_per_product);
    for (int i = 0; i < n_sup; ++i)
        suppliers.push_back({static_cast<int>(suppliers.size()), rng.below(cfg.nodes), 0,
                             draw(rng, cfg.supply_capacity), draw(rng, cfg.supply_cost)});

    constexpr double kStageValueFactor = 1.7;  // outpaces yield loss and costs
    std::vector<Consumer> consumers;
    for (int p = 0; p < cfg.products; ++p) {
        const int n_con = draw(rng, cfg.consumers_per_product);
        double stage = 1.0;
        for (int s = 0; s < p; ++s) stage *= kStageValueFactor;
        for (int i = 0; i < n_con; ++i)
            consumers.push_back({static_cast<int>(consumers.size()), rng.below(cfg.nodes), p,
                                 draw(rng, cfg.consumer_capacity),
                                 stage * draw(rng, cfg.consumer_value)});
    }

    // conversion type k feeds on product k mod (P-1) and emits the next one;
    // inputs are consumed one-for-one, outputs carry the drawn yield. With a
    // single product there is nothing to convert, so types become disposal
    // units (idle at any optimum but keeping the integer dimension alive).
    std::vector<Technology> technologies;
    for (int k = 0; k < cfg.technologies; ++k) {
        const int input = cfg.products > 1 ? k % (cfg.products - 1) : 0;
        std::map<int, double> yields;
        yields[input] = -1.0;
        if (cfg.products > 1) yields[input + 1] = draw(rng, cfg.tech_yield);

        const int hosts = std::max(1, static_cast<int>(std::lround(cfg.tech_density * cfg.nodes)));
        const auto host_nodes = sample_without_replacement(cfg.nodes, std::min(hosts, cfg.nodes), rng);
        for (int n : host_nodes)
            technologies.push_back({static_cast<int>(technologies.size()), n, input, yields,
                                    draw(rng, cfg.tech_unit_capacity),
                                    draw(rng, cfg.tech_max_facilities), draw(rng, cfg.tech_op_cost),
                                    draw(rng, cfg.tech_install_cost)});
    }

    std::vector<double> base_cost(cfg.products);
    for (int p = 0; p < cfg.products; ++p) base_cost[p] = draw(rng, cfg.edge_cost_base);

    std::vector<TransportEdge> edges;
    for (int src = 0; src < cfg.nodes; ++src)
        for (int dst = 0; dst < cfg.nodes; ++dst) {
            if (src == dst) continue;
            if (cfg.edge_rule == EdgeRule::radius && dist(src, dst) > cfg.radius) continue;
            for (int p = 0; p < cfg.products; ++p)
                edges.push_back({static_cast<int>(edges.size()), src, dst, p,
                                 draw(rng, cfg.edge_capacity),
                                 base_cost[p] + cfg.cost_per_distance * dist(src, dst)});
        }
    if (edges.empty() && cfg.nodes > 1)
        throw std::invalid_argument("generate: edge rule produced no edges; widen the radius");

    if (cfg.ensure_profitable && !edges.empty()) {
        // pin one raw-product route into profitability: relocate the first
        // supplier and first raw consumer onto an existing edge and make the
        // consumer outbid the route cost with room to spare
        TransportEdge* corridor = nullptr;
        for (auto& e : edges)
            if (e.product == 0) {
                corridor = &e;
                break;
            }
        if (corridor != nullptr) {
            Supplier& s = suppliers.front();
            s.node = corridor->src;
            s.capacity = std::max(s.capacity, 5.0);
            Consumer* raw_consumer = nullptr;
            for (auto& c : consumers)
                if (c.product == 0) {
                    raw_consumer = &c;
                    break;
                }
            if (raw_consumer != nullptr) {
                raw_consumer->node = corridor->dst;
                raw_consumer->capacity = std::max(raw_consumer->capacity, 5.0);
                raw_consumer->value =
                    std::max(raw_consumer->value, s.cost + corridor->cost + 1.0);
                corridor->capacity = std::max(corridor->capacity, 5.0);
            }
        }
    }

    SupplyChainInstance inst(std::move(products), std::move(nodes), std::move(suppliers),
                             std::move(consumers), std::move(technologies), std::move(edges),
                             /*unique_edges=*/true);
    const auto violations = validate_instance(inst);
    if (!violations.empty())
        throw std::logic_error("generate: produced an invalid instance (" +
                               violations.front().entity + ": " + violations.front().rule + ")");
    return inst;
}

GenConfig toy_config() {
    GenConfig cfg;
    cfg.nodes = 2;
    cfg.products = 1;
    cfg.technologies = 0;
    cfg.suppliers_per_product = {1, 1};
    cfg.consumers_per_product = {1, 1};
    cfg.supply_cost = {1.0, 1.0};
    cfg.supply_capacity = {10.0, 10.0};
    cfg.consumer_value = {7.0, 7.0};
    cfg.consumer_capacity = {7.0, 7.0};
    cfg.edge_capacity = {10.0, 10.0};
    cfg.edge_cost_base = {1.0, 1.0};
    cfg.cost_per_distance = 0.0;
    // the corridor pass pins the supplier to node 0 and the consumer to
    // node 1, which is what forces the 7 units across the unit-cost edge
    cfg.ensure_profitable = true;
    cfg.seed = 0;
    return cfg;
}

}  // namespace chainbound
