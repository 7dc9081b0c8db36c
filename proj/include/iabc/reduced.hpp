#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "iabc/exec.hpp"
#include "iabc/graph.hpp"

namespace iabc {

/// One element of R_F: the fault-free nodes with, at each node, the incoming
/// edges that survive after removing the faulty nodes and then exactly
/// min(f, surviving in-degree) more incoming edges.
struct ReducedGraph {
    std::vector<int> nodes;                // fault-free ids, ascending
    std::vector<std::vector<int>> kept_in; // parallel to nodes, ascending ids

    int index_of(int id) const; // -1 if absent
    const std::vector<int>& kept_in_of(int id) const;
    bool operator==(const ReducedGraph&) const = default;
};

/// 0/1 matrix of a reduced graph: entry (i, j) = 1 iff edge j -> i is kept
/// or i = j. Rows/columns indexed by position in `nodes`.
struct ConnectivityMatrix {
    int dim = 0;
    std::vector<int> nodes;      // ascending fault-free ids
    std::vector<uint8_t> a;      // row-major, dim*dim

    uint8_t at(int i, int j) const { return a[static_cast<size_t>(i) * dim + j]; }
    uint8_t& at(int i, int j) { return a[static_cast<size_t>(i) * dim + j]; }
};

/// |R_F| without materializing the set: product over fault-free nodes of
/// C(surviving in-degree, min(f, surviving in-degree)). Saturates at
/// UINT64_MAX on overflow.
uint64_t reduced_graph_count(const DirectedGraph& g, const FaultConfig& fc);

/// All of R_F in canonical order (kept sets in lexicographic order per node,
/// earlier nodes varying slowest). Throws ConfigError if fc is inconsistent
/// with g or |R_F| exceeds `limit`.
std::vector<ReducedGraph> enumerate_reduced_graphs(const DirectedGraph& g, const FaultConfig& fc,
                                                   uint64_t limit = 10'000'000);

/// Smallest node having directed paths (within kept edges) to every node of h.
std::optional<int> root_exists(const ReducedGraph& h);

ConnectivityMatrix connectivity_matrix(const ReducedGraph& h);

/// Boolean matrix power m^p (OR/AND). Diagonal of m is expected to be 1.
ConnectivityMatrix boolean_power(const ConnectivityMatrix& m, int p);

/// Node id of some all-positive column of m^p (smallest), if any.
std::optional<int> has_nonzero_column_in_power(const ConnectivityMatrix& m, int p);

enum class SufficiencyMethod {
    Auto,       // Enumerate when tau_F <= 100000, else SourceSets
    Enumerate,  // walk R_F in canonical order, first rootless H is the witness
    SourceSets, // disjoint source-set characterization, witness constructed
};

struct SufficiencyWitness {
    std::vector<int> faulty; // the F that fails
    ReducedGraph h;          // a rootless element of R_F
};

struct SufficiencyReport {
    bool ok = false;
    std::optional<SufficiencyWitness> witness;
};

/// Fixed-F variant: every H in R_F has a root.
SufficiencyReport check_sufficiency_for(const DirectedGraph& g, const FaultConfig& fc,
                                        SufficiencyMethod method = SufficiencyMethod::Auto);

/// Full condition: for every F with |F| <= f and every H in R_F, a root
/// exists. F candidates are scanned in canonical order (size, then lexicographic);
/// the witness is the first failure. Exponential in n; intended for small graphs.
SufficiencyReport check_sufficiency_condition(const DirectedGraph& g, int f,
                                              SufficiencyMethod method = SufficiencyMethod::Auto,
                                              Exec exec = Exec::Serial);

} // namespace iabc
