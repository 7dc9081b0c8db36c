#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "iabc/adversary.hpp"
#include "iabc/exec.hpp"
#include "iabc/graph.hpp"

namespace iabc {

struct NodeState {
    int node_id = 0;
    double value = 0.0;
};

/// Values received by one node in one round, keyed by sender; the key set is
/// exactly N_i^- (withheld messages already replaced by the default value).
struct RoundInbox {
    int receiver = 0;
    std::vector<std::pair<int, double>> entries; // sender-ascending

    double value_from(int sender) const;
};

/// Result of eliminating the f largest and f smallest received values.
struct TrimOutcome {
    std::vector<int> kept;                        // N_i^*[t], ascending
    std::vector<int> removed_large;               // L, in (value, id) order
    std::vector<int> removed_small;               // S, in (value, id) order
    std::vector<std::pair<int, double>> kept_values; // sender-ascending

    double kept_value_of(int sender) const;
};

/// Everything needed to replay (and later reconstruct) one synchronous round.
struct RoundTrace {
    int t = 1;
    std::vector<int> ff_ids;              // ascending fault-free ids
    std::vector<RoundInbox> inboxes;      // parallel to ff_ids
    std::vector<TrimOutcome> trims;       // parallel to ff_ids
    std::vector<double> states_before;    // v[t-1], parallel to ff_ids
    std::vector<double> states_after;     // v[t]
    double u_before = 0, u_after = 0, mu_before = 0, mu_after = 0;

    int index_of(int id) const; // -1 if absent
};

struct ScenarioConfig {
    DirectedGraph graph;
    FaultConfig faults;
    AdversarySpec adversary;
    std::vector<double> inputs;  // length n; faulty entries ignored
    double epsilon = 1e-6;
    int max_iters = 10000;
    double default_value = 0.0;
    uint64_t seed = 0;

    void validate() const; // throws ConfigError
};

struct RunSummary {
    std::vector<int> ff_ids;
    double u0 = 0, mu0 = 0;
    std::vector<std::pair<double, double>> round_u_mu; // (U[t], mu[t]) for t = 1..rounds
    int rounds = 0;
    bool converged = false;
    double final_spread = 0;
    bool validity_ok = false;
    std::vector<NodeState> final_states;
};

struct ScenarioResult {
    std::vector<RoundTrace> traces;
    RunSummary summary;
};

/// a_i = 1/(|N_i^-| - 2f + 1). Errors when |N_i^-| < 2f + 1 (the update would
/// average an empty kept set).
double weight_a(const DirectedGraph& g, int f, int i);

/// alpha = min_i a_i over all nodes.
double alpha(const DirectedGraph& g, int f);

/// Sort by (value, sender id), drop the f smallest and f largest.
TrimOutcome trim(const RoundInbox& inbox, int f);

/// a * (own + sum of kept values); a must equal 1/(|kept| + 1).
double update_value(double own, const TrimOutcome& trimmed, double a);

/// One synchronous round for all fault-free nodes. `states` is parallel to
/// the ascending fault-free id list.
RoundTrace run_round(const DirectedGraph& g, const FaultConfig& fc, const std::vector<double>& states,
                     const AdversarySpec& adversary, int t, double default_value, uint64_t seed,
                     Exec exec = Exec::Serial);

/// Runs rounds until U - mu < epsilon or max_iters is reached.
ScenarioResult run_scenario(const ScenarioConfig& config, Exec exec = Exec::Serial);

/// mu non-decreasing and U non-increasing over the whole run (relative
/// tolerance 1e-12).
bool check_validity(const std::vector<RoundTrace>& traces);

double spread_of(const std::vector<double>& states);

} // namespace iabc
