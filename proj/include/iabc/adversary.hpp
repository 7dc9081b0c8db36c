#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iabc/graph.hpp"

namespace iabc {

/// Read-only snapshot handed to a strategy at the start of round t. Faulty
/// nodes know everything: all states, the topology, and the algorithm
/// parameters.
struct AdversaryView {
    int t = 1;
    const DirectedGraph* graph = nullptr;
    const FaultConfig* faults = nullptr;
    std::vector<int> ff_ids;          // fault-free ids, ascending
    std::vector<double> states;       // v[t-1] for fault-free nodes, parallel to ff_ids
    double u_prev = 0.0;              // U[t-1]
    double mu_prev = 0.0;             // mu[t-1]
    int f = 0;
    std::vector<double> a;            // a_i per fault-free node, parallel to ff_ids
    double default_value = 0.0;
    uint64_t seed = 0;

    double state_of(int id) const;
};

/// Per-edge messages from faulty senders to fault-free receivers for one
/// round. A missing key means the message is withheld and the receiver
/// substitutes the default value.
struct FaultyEmission {
    std::map<std::pair<int, int>, double> messages; // (faulty sender, receiver) -> value
};

struct AdversarySpec {
    std::string name = "silent";
    std::map<std::string, double> params;
    std::optional<uint64_t> seed; // overrides the scenario seed when present
};

/// Built-in strategies: silent, constant, boundary_push, split_random,
/// mimic_extreme. Deterministic given (spec, view). Throws ConfigError on an
/// unknown name.
FaultyEmission emit(const AdversarySpec& spec, const AdversaryView& view);

const std::vector<std::string>& builtin_strategies();

} // namespace iabc
