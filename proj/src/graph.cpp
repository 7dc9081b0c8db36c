#include "iabc/graph.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace iabc {

DirectedGraph::DirectedGraph(int n, std::vector<std::pair<int, int>> edges) : n_(n) {
    if (n < 1) throw ConfigError("graph: n must be positive, got " + std::to_string(n));
    std::set<std::pair<int, int>> uniq;
    for (const auto& [from, to] : edges) {
        if (from < 1 || from > n || to < 1 || to > n)
            throw ConfigError("graph: edge (" + std::to_string(from) + ", " + std::to_string(to) +
                              ") out of range 1.." + std::to_string(n));
        if (from == to)
            throw ConfigError("graph: self-loop at node " + std::to_string(from));
        uniq.emplace(from, to);
    }
    edges_.assign(uniq.begin(), uniq.end());
    in_.assign(static_cast<size_t>(n), {});
    out_.assign(static_cast<size_t>(n), {});
    for (const auto& [from, to] : edges_) {
        out_[static_cast<size_t>(from - 1)].push_back(to);
        in_[static_cast<size_t>(to - 1)].push_back(from);
    }
    for (auto& v : in_) std::sort(v.begin(), v.end());
    for (auto& v : out_) std::sort(v.begin(), v.end());
}

bool DirectedGraph::has_edge(int from, int to) const {
    const auto& outs = out_neighbors(from);
    return std::binary_search(outs.begin(), outs.end(), to);
}

const std::vector<int>& DirectedGraph::in_neighbors(int i) const {
    if (i < 1 || i > n_) throw ConfigError("graph: node " + std::to_string(i) + " out of range");
    return in_[static_cast<size_t>(i - 1)];
}

const std::vector<int>& DirectedGraph::out_neighbors(int i) const {
    if (i < 1 || i > n_) throw ConfigError("graph: node " + std::to_string(i) + " out of range");
    return out_[static_cast<size_t>(i - 1)];
}

DirectedGraph DirectedGraph::complete(int n) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<size_t>(n) * (n - 1));
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b)
            if (a != b) edges.emplace_back(a, b);
    return DirectedGraph(n, std::move(edges));
}

NeighborSets neighbor_sets(const DirectedGraph& g) {
    NeighborSets ns;
    ns.in.reserve(static_cast<size_t>(g.n()));
    ns.out.reserve(static_cast<size_t>(g.n()));
    for (int i = 1; i <= g.n(); ++i) {
        ns.in.push_back(g.in_neighbors(i));
        ns.out.push_back(g.out_neighbors(i));
    }
    return ns;
}

FaultConfig::FaultConfig(int f_, std::vector<int> faulty_) : f(f_), faulty(std::move(faulty_)) {
    std::sort(faulty.begin(), faulty.end());
    faulty.erase(std::unique(faulty.begin(), faulty.end()), faulty.end());
}

bool FaultConfig::is_faulty(int id) const {
    return std::binary_search(faulty.begin(), faulty.end(), id);
}

void FaultConfig::validate(const DirectedGraph& g) const {
    if (f < 0) throw ConfigError("fault config: f must be non-negative");
    if (phi() > f)
        throw ConfigError("fault config: |F| = " + std::to_string(phi()) + " exceeds f = " +
                          std::to_string(f));
    for (int id : faulty)
        if (id < 1 || id > g.n())
            throw ConfigError("fault config: faulty node " + std::to_string(id) + " out of range");
}

std::vector<int> FaultConfig::fault_free(const DirectedGraph& g) const {
    std::vector<int> ff;
    ff.reserve(static_cast<size_t>(g.n() - phi()));
    for (int i = 1; i <= g.n(); ++i)
        if (!is_faulty(i)) ff.push_back(i);
    return ff;
}

DegreeReport check_degree_condition(const DirectedGraph& g, int f) {
    DegreeReport report;
    if (f < 0) throw ConfigError("degree condition: f must be non-negative");
    if (f == 0) {
        report.ok = true;
        return report;
    }
    for (int i = 1; i <= g.n(); ++i)
        if (g.in_degree(i) <= 2 * f) report.violating.push_back(i);
    report.ok = report.violating.empty();
    return report;
}

} // namespace iabc
