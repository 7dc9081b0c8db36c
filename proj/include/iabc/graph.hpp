#pragma once

#include <utility>
#include <vector>

#include "iabc/errors.hpp"

namespace iabc {

/// Simple directed graph on nodes 1..n, self-loops excluded.
/// Edge (j, i) means j transmits to i; j is an incoming neighbor of i.
class DirectedGraph {
public:
    DirectedGraph(int n, std::vector<std::pair<int, int>> edges);

    int n() const { return n_; }
    bool has_edge(int from, int to) const;

    /// Incoming neighbors of node i (ascending ids).
    const std::vector<int>& in_neighbors(int i) const;
    /// Outgoing neighbors of node i (ascending ids).
    const std::vector<int>& out_neighbors(int i) const;
    int in_degree(int i) const { return static_cast<int>(in_neighbors(i).size()); }

    /// Canonically sorted edge list (j, i).
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    static DirectedGraph complete(int n);

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> in_, out_;
};

/// In/out neighbor sets for every node of a graph.
struct NeighborSets {
    std::vector<std::vector<int>> in;  // [id-1], ascending
    std::vector<std::vector<int>> out; // [id-1], ascending

    const std::vector<int>& in_of(int id) const { return in[static_cast<size_t>(id - 1)]; }
    const std::vector<int>& out_of(int id) const { return out[static_cast<size_t>(id - 1)]; }
};

NeighborSets neighbor_sets(const DirectedGraph& g);

/// Fault bound f plus the actual faulty set F, |F| <= f.
struct FaultConfig {
    int f = 0;
    std::vector<int> faulty; // ascending ids

    FaultConfig() = default;
    FaultConfig(int f_, std::vector<int> faulty_);

    int phi() const { return static_cast<int>(faulty.size()); }
    bool is_faulty(int id) const;
    /// Throws ConfigError if F is out of range for g or |F| > f.
    void validate(const DirectedGraph& g) const;
    /// V - F, ascending.
    std::vector<int> fault_free(const DirectedGraph& g) const;
};

struct DegreeReport {
    bool ok = false;
    std::vector<int> violating; // nodes with |N_i^-| <= 2f, ascending
};

/// Necessary condition: every node has more than 2f incoming neighbors
/// (vacuously true for f = 0).
DegreeReport check_degree_condition(const DirectedGraph& g, int f);

} // namespace iabc
