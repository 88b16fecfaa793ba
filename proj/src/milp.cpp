#include "chainbound/milp.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace chainbound {

int MilpProblem::count_vars(VarKind kind) const {
    int n = 0;
    for (const VarRef& v : vars) n += (v.kind == kind) ? 1 : 0;
    return n;
}

int MilpProblem::count_rows(Relation rel) const {
    int n = 0;
    for (const ConstraintRow& r : rows) n += (r.rel == rel) ? 1 : 0;
    return n;
}

bool MilpProblem::operator==(const MilpProblem& other) const {
    if (name != other.name || objective != other.objective || labels != other.labels) return false;
    if (vars.size() != other.vars.size() || rows.size() != other.rows.size()) return false;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const VarRef &a = vars[i], &b = other.vars[i];
        if (a.index != b.index || a.kind != b.kind || a.lower != b.lower || a.upper != b.upper)
            return false;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ConstraintRow &a = rows[i], &b = other.rows[i];
        if (a.name != b.name || a.rel != b.rel || a.rhs != b.rhs || a.terms != b.terms) return false;
    }
    return true;
}

std::vector<std::string> validate_problem(const MilpProblem& prob) {
    std::vector<std::string> out;
    const int n = prob.num_vars();
    if (static_cast<int>(prob.objective.size()) != n)
        out.push_back("objective length does not match variable count");
    if (static_cast<int>(prob.labels.size()) != n)
        out.push_back("label count does not match variable count");
    for (int i = 0; i < n; ++i) {
        const VarRef& v = prob.vars[i];
        if (v.index != i) out.push_back("variable " + std::to_string(i) + " has wrong index");
        if (v.lower > v.upper) out.push_back("variable " + std::to_string(i) + " has lower > upper");
        if (v.kind == VarKind::integer) {
            if (std::isfinite(v.lower) && v.lower != std::floor(v.lower))
                out.push_back("integer variable " + std::to_string(i) + " has fractional lower bound");
            if (std::isfinite(v.upper) && v.upper != std::floor(v.upper))
                out.push_back("integer variable " + std::to_string(i) + " has fractional upper bound");
        }
    }
    for (const ConstraintRow& row : prob.rows)
        for (const LinearTerm& term : row.terms)
            if (term.var < 0 || term.var >= n)
                out.push_back("row " + row.name + " references undeclared variable");
    // labels must be a bijection: distinct (role, entity) pairs
    std::vector<std::pair<int, int>> keys;
    keys.reserve(prob.labels.size());
    for (const VarLabel& l : prob.labels) keys.emplace_back(static_cast<int>(l.role), l.entity);
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
        out.push_back("duplicate variable label");
    return out;
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible_with_gap: return "feasible-with-gap";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::time_limit: return "time-limit";
        case SolveStatus::memory_limit: return "memory-limit";
    }
    return "unknown";
}

ModelSize full_model_size(long long suppliers, long long consumers, long long edges,
                          long long technologies, long long nodes, long long products) {
    ModelSize s;
    s.continuous_vars = suppliers + consumers + edges + technologies;
    s.integer_vars = technologies;
    s.equality_rows = nodes * products;
    s.inequality_rows = technologies;
    return s;
}

namespace {

// Variable ordering is part of the determinism contract: suppliers,
// consumers, edges by id, then technology throughputs, then build counts.
struct VarLayout {
    int supply_base = 0;
    int demand_base = 0;
    int flow_base = 0;
    int process_base = 0;
    int build_base = 0;
};

void append_balance_rows(const SupplyChainInstance& inst, const VarLayout& lay,
                         const std::vector<int>& flow_var_of_edge, MilpProblem& prob) {
    for (int n = 0; n < inst.num_nodes(); ++n) {
        for (int p = 0; p < inst.num_products(); ++p) {
            ConstraintRow row;
            row.name = "balance_n" + std::to_string(n) + "_p" + std::to_string(p);
            row.rel = Relation::eq;
            row.rhs = 0.0;
            for (int i : inst.suppliers_at(n, p)) row.terms.push_back({lay.supply_base + i, 1.0});
            for (int l : inst.edges_in(n, p))
                if (flow_var_of_edge[l] >= 0) row.terms.push_back({flow_var_of_edge[l], 1.0});
            for (int j : inst.consumers_at(n, p)) row.terms.push_back({lay.demand_base + j, -1.0});
            for (int l : inst.edges_out(n, p))
                if (flow_var_of_edge[l] >= 0) row.terms.push_back({flow_var_of_edge[l], -1.0});
            for (int t : inst.technologies_at(n)) {
                auto it = inst.technologies()[t].yields.find(p);
                if (it != inst.technologies()[t].yields.end() && it->second != 0.0)
                    row.terms.push_back({lay.process_base + t, it->second});
            }
            prob.rows.push_back(std::move(row));
        }
    }
}

void append_capacity_link_rows(const SupplyChainInstance& inst, const VarLayout& lay,
                               MilpProblem& prob) {
    for (const Technology& t : inst.technologies()) {
        ConstraintRow row;
        row.name = "capacity_t" + std::to_string(t.id);
        row.rel = Relation::le;
        row.rhs = 0.0;
        row.terms.push_back({lay.process_base + t.id, 1.0});
        row.terms.push_back({lay.build_base + t.id, -t.unit_capacity});
        prob.rows.push_back(std::move(row));
    }
}

}  // namespace

// Shared by the full and edge-restricted formulations; formulate_full passes
// a flow variable for every edge.
MilpProblem formulate_with_edges(const SupplyChainInstance& inst,
                                 const std::vector<int>& active_edges, const std::string& name) {
    const auto violations = validate_instance(inst);
    if (!violations.empty())
        throw std::invalid_argument("invalid instance: " + violations.front().entity + ": " +
                                    violations.front().rule);

    MilpProblem prob;
    prob.name = name;
    VarLayout lay;
    lay.supply_base = 0;
    lay.demand_base = lay.supply_base + inst.num_suppliers();
    lay.flow_base = lay.demand_base + inst.num_consumers();
    lay.process_base = lay.flow_base + static_cast<int>(active_edges.size());
    lay.build_base = lay.process_base + inst.num_technologies();
    const int total = lay.build_base + inst.num_technologies();

    prob.vars.reserve(total);
    prob.objective.reserve(total);
    prob.labels.reserve(total);
    auto add_var = [&](VarKind kind, double lower, double upper, double obj, VarRole role,
                       int entity) {
        prob.vars.push_back({static_cast<int>(prob.vars.size()), kind, lower, upper});
        prob.objective.push_back(obj);
        prob.labels.push_back({role, entity});
    };

    for (const Supplier& s : inst.suppliers())
        add_var(VarKind::continuous, 0.0, s.capacity, -s.cost, VarRole::supply, s.id);
    for (const Consumer& c : inst.consumers())
        add_var(VarKind::continuous, 0.0, c.capacity, c.value, VarRole::demand, c.id);
    std::vector<int> flow_var_of_edge(inst.num_edges(), -1);
    for (int l : active_edges) {
        const TransportEdge& e = inst.edges()[l];
        flow_var_of_edge[l] = static_cast<int>(prob.vars.size());
        add_var(VarKind::continuous, 0.0, e.capacity, -e.cost, VarRole::flow, e.id);
    }
    for (const Technology& t : inst.technologies())
        add_var(VarKind::continuous, 0.0, t.unit_capacity * t.max_facilities, -t.op_cost,
                VarRole::process, t.id);
    for (const Technology& t : inst.technologies())
        add_var(VarKind::integer, 0.0, static_cast<double>(t.max_facilities), -t.install_cost,
                VarRole::build, t.id);

    append_balance_rows(inst, lay, flow_var_of_edge, prob);
    append_capacity_link_rows(inst, lay, prob);
    return prob;
}

MilpProblem formulate_full(const SupplyChainInstance& inst) {
    std::vector<int> all(inst.num_edges());
    for (int l = 0; l < inst.num_edges(); ++l) all[l] = l;
    return formulate_with_edges(inst, all, "full");
}

Allocation extract_allocation(const SupplyChainInstance& inst, const MilpProblem& prob,
                              const SolveResult& result) {
    if (!result.has_solution())
        throw std::invalid_argument(std::string("no solution to extract: status ") +
                                    to_string(result.status));
    if (result.values.size() != prob.vars.size())
        throw std::invalid_argument("solution length does not match problem");

    Allocation alloc = Allocation::zeros(inst.num_suppliers(), inst.num_consumers(),
                                         inst.num_edges(), inst.num_technologies());
    bool has_agg_flow = false;
    for (int v = 0; v < prob.num_vars(); ++v) {
        const VarLabel& label = prob.labels[v];
        const double x = result.values[v];
        switch (label.role) {
            case VarRole::supply: alloc.supply.at(label.entity) = x; break;
            case VarRole::demand: alloc.demand.at(label.entity) = x; break;
            case VarRole::flow: alloc.flow.at(label.entity) = x; break;
            case VarRole::process: alloc.process.at(label.entity) = x; break;
            case VarRole::build: {
                const double rounded = std::round(x);
                if (std::abs(x - rounded) > 1e-5 * (1.0 + std::abs(x)))
                    throw std::runtime_error("integer variable far from integral in solution");
                alloc.built.at(label.entity) = static_cast<int>(rounded);
                break;
            }
            case VarRole::agg_flow: has_agg_flow = true; break;
        }
    }
    alloc.welfare = evaluate_welfare(inst, alloc);
    if (!has_agg_flow && result.objective) {
        const double obj = *result.objective;
        if (std::abs(obj - alloc.welfare) > 1e-6 * (1.0 + std::abs(obj)))
            throw std::runtime_error("solver objective does not reconcile with recomputed welfare");
    }
    return alloc;
}

namespace {

std::string var_name(const MilpProblem& prob, int v) {
    const VarLabel& label = prob.labels[v];
    switch (label.role) {
        case VarRole::supply: return "s" + std::to_string(label.entity);
        case VarRole::demand: return "d" + std::to_string(label.entity);
        case VarRole::flow: return "f" + std::to_string(label.entity);
        case VarRole::process: return "xi" + std::to_string(label.entity);
        case VarRole::build: return "y" + std::to_string(label.entity);
        case VarRole::agg_flow: return "F" + std::to_string(label.entity);
    }
    return "v" + std::to_string(v);
}

void write_number(std::ostream& os, double x) {
    std::ostringstream tmp;
    tmp.precision(17);
    tmp << x;
    os << tmp.str();
}

void write_terms(std::ostream& os, const MilpProblem& prob, const std::vector<LinearTerm>& terms) {
    bool first = true;
    for (const LinearTerm& t : terms) {
        if (t.coef == 0.0) continue;
        os << (t.coef < 0 ? " - " : (first ? " " : " + "));
        write_number(os, std::abs(t.coef));
        os << " " << var_name(prob, t.var);
        first = false;
    }
    if (first) os << " 0 " << var_name(prob, 0);
}

}  // namespace

void write_lp(std::ostream& os, const MilpProblem& prob) {
    os << "\\ " << (prob.name.empty() ? std::string("problem") : prob.name) << "\n";
    os << "Maximize\n obj:";
    std::vector<LinearTerm> obj;
    for (int v = 0; v < prob.num_vars(); ++v)
        if (prob.objective[v] != 0.0) obj.push_back({v, prob.objective[v]});
    write_terms(os, prob, obj);
    os << "\nSubject To\n";
    for (const ConstraintRow& row : prob.rows) {
        os << " " << row.name << ":";
        write_terms(os, prob, row.terms);
        os << (row.rel == Relation::eq ? " = " : row.rel == Relation::le ? " <= " : " >= ");
        write_number(os, row.rhs);
        os << "\n";
    }
    os << "Bounds\n";
    for (const VarRef& v : prob.vars) {
        os << " ";
        write_number(os, v.lower);
        os << " <= " << var_name(prob, v.index) << " <= ";
        write_number(os, v.upper);
        os << "\n";
    }
    if (prob.count_vars(VarKind::integer) > 0) {
        os << "Generals\n";
        for (const VarRef& v : prob.vars)
            if (v.kind == VarKind::integer) os << " " << var_name(prob, v.index);
        os << "\n";
    }
    os << "End\n";
}

std::string to_lp_string(const MilpProblem& prob) {
    std::ostringstream os;
    write_lp(os, prob);
    return os.str();
}

}  // namespace chainbound
