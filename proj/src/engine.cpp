#include "iabc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace iabc {
namespace {

double rel_tol(double a, double b) { return 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)}); }

} // namespace

double RoundInbox::value_from(int sender) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), sender,
                               [](const auto& e, int s) { return e.first < s; });
    if (it == entries.end() || it->first != sender)
        throw ConfigError("inbox of node " + std::to_string(receiver) + ": no entry from " +
                          std::to_string(sender));
    return it->second;
}

double TrimOutcome::kept_value_of(int sender) const {
    auto it = std::lower_bound(kept_values.begin(), kept_values.end(), sender,
                               [](const auto& e, int s) { return e.first < s; });
    if (it == kept_values.end() || it->first != sender)
        throw ConfigError("trim outcome: sender " + std::to_string(sender) + " was not kept");
    return it->second;
}

int RoundTrace::index_of(int id) const {
    auto it = std::lower_bound(ff_ids.begin(), ff_ids.end(), id);
    if (it == ff_ids.end() || *it != id) return -1;
    return static_cast<int>(it - ff_ids.begin());
}

double weight_a(const DirectedGraph& g, int f, int i) {
    const int indeg = g.in_degree(i);
    if (indeg < 2 * f + 1)
        throw ConfigError("node " + std::to_string(i) + " has in-degree " + std::to_string(indeg) +
                          ", need at least 2f+1 = " + std::to_string(2 * f + 1));
    return 1.0 / static_cast<double>(indeg - 2 * f + 1);
}

double alpha(const DirectedGraph& g, int f) {
    double a = 1.0;
    for (int i = 1; i <= g.n(); ++i) a = std::min(a, weight_a(g, f, i));
    return a;
}

TrimOutcome trim(const RoundInbox& inbox, int f) {
    const int m = static_cast<int>(inbox.entries.size());
    if (f < 0) throw ConfigError("trim: f must be non-negative");
    if (m < 2 * f + 1)
        throw ConfigError("trim: node " + std::to_string(inbox.receiver) + " received " +
                          std::to_string(m) + " values, need at least " + std::to_string(2 * f + 1));
    // (value, sender id) ascending; ids are unique so the order is total
    std::vector<std::pair<double, int>> sorted;
    sorted.reserve(static_cast<size_t>(m));
    for (const auto& [sender, value] : inbox.entries) sorted.emplace_back(value, sender);
    std::sort(sorted.begin(), sorted.end());

    TrimOutcome out;
    for (int k = 0; k < f; ++k) out.removed_small.push_back(sorted[static_cast<size_t>(k)].second);
    for (int k = m - f; k < m; ++k) out.removed_large.push_back(sorted[static_cast<size_t>(k)].second);
    for (int k = f; k < m - f; ++k) {
        out.kept.push_back(sorted[static_cast<size_t>(k)].second);
        out.kept_values.emplace_back(sorted[static_cast<size_t>(k)].second, sorted[static_cast<size_t>(k)].first);
    }
    std::sort(out.kept.begin(), out.kept.end());
    std::sort(out.kept_values.begin(), out.kept_values.end());
    return out;
}

double update_value(double own, const TrimOutcome& trimmed, double a) {
    const double expected = 1.0 / static_cast<double>(trimmed.kept.size() + 1);
    if (std::fabs(a - expected) > 1e-9)
        throw ConfigError("update: weight a = " + std::to_string(a) + " does not match 1/(|kept|+1)");
    double sum = own;
    for (const auto& [sender, value] : trimmed.kept_values) sum += value;
    return a * sum;
}

double spread_of(const std::vector<double>& states) {
    if (states.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(states.begin(), states.end());
    return *hi - *lo;
}

RoundTrace run_round(const DirectedGraph& g, const FaultConfig& fc, const std::vector<double>& states,
                     const AdversarySpec& adversary, int t, double default_value, uint64_t seed,
                     Exec exec) {
    fc.validate(g);
    const auto ff = fc.fault_free(g);
    const int q = static_cast<int>(ff.size());
    if (states.size() != ff.size())
        throw ConfigError("run_round: state vector has " + std::to_string(states.size()) +
                          " entries, expected " + std::to_string(ff.size()));

    AdversaryView view;
    view.t = t;
    view.graph = &g;
    view.faults = &fc;
    view.ff_ids = ff;
    view.states = states;
    view.u_prev = *std::max_element(states.begin(), states.end());
    view.mu_prev = *std::min_element(states.begin(), states.end());
    view.f = fc.f;
    view.default_value = default_value;
    view.seed = seed;
    for (int id : ff) view.a.push_back(weight_a(g, fc.f, id));
    const FaultyEmission emission = emit(adversary, view);

    RoundTrace trace;
    trace.t = t;
    trace.ff_ids = ff;
    trace.inboxes.resize(static_cast<size_t>(q));
    trace.trims.resize(static_cast<size_t>(q));
    trace.states_before = states;
    trace.states_after.assign(static_cast<size_t>(q), 0.0);
    trace.u_before = view.u_prev;
    trace.mu_before = view.mu_prev;

    auto update_node = [&](int p) {
        const int i = ff[static_cast<size_t>(p)];
        RoundInbox inbox;
        inbox.receiver = i;
        for (int j : g.in_neighbors(i)) {
            double v;
            if (fc.is_faulty(j)) {
                auto it = emission.messages.find({j, i});
                v = it == emission.messages.end() ? default_value : it->second;
            } else {
                v = states[static_cast<size_t>(trace.index_of(j))];
            }
            inbox.entries.emplace_back(j, v);
        }
        TrimOutcome trimmed = trim(inbox, fc.f);
        const double a = view.a[static_cast<size_t>(p)];
        trace.states_after[static_cast<size_t>(p)] =
            update_value(states[static_cast<size_t>(p)], trimmed, a);
        trace.inboxes[static_cast<size_t>(p)] = std::move(inbox);
        trace.trims[static_cast<size_t>(p)] = std::move(trimmed);
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int p = 0; p < q; ++p) update_node(p);
    } else {
        for (int p = 0; p < q; ++p) update_node(p);
    }

    trace.u_after = *std::max_element(trace.states_after.begin(), trace.states_after.end());
    trace.mu_after = *std::min_element(trace.states_after.begin(), trace.states_after.end());
    return trace;
}

void ScenarioConfig::validate() const {
    faults.validate(graph);
    if (inputs.size() != static_cast<size_t>(graph.n()))
        throw ConfigError("config: " + std::to_string(inputs.size()) + " inputs for " +
                          std::to_string(graph.n()) + " nodes");
    if (!(epsilon > 0)) throw ConfigError("config: epsilon must be positive");
    if (max_iters < 1) throw ConfigError("config: max_iters must be at least 1");
    const auto& names = builtin_strategies();
    if (std::find(names.begin(), names.end(), adversary.name) == names.end())
        throw ConfigError("unknown adversary strategy '" + adversary.name + "'");
    for (double v : inputs)
        if (!std::isfinite(v)) throw ConfigError("config: inputs must be finite");
}

ScenarioResult run_scenario(const ScenarioConfig& config, Exec exec) {
    config.validate();
    const auto degree = check_degree_condition(config.graph, config.faults.f);
    if (!degree.ok)
        throw ConfigError("degree condition fails at node " + std::to_string(degree.violating.front()) +
                          " (in-degree must exceed 2f)");
    alpha(config.graph, config.faults.f); // every node must support the update

    ScenarioResult result;
    const auto ff = config.faults.fault_free(config.graph);
    std::vector<double> states;
    states.reserve(ff.size());
    for (int id : ff) states.push_back(config.inputs[static_cast<size_t>(id - 1)]);

    RunSummary& summary = result.summary;
    summary.ff_ids = ff;
    summary.u0 = *std::max_element(states.begin(), states.end());
    summary.mu0 = *std::min_element(states.begin(), states.end());

    const uint64_t seed = config.adversary.seed.value_or(config.seed);
    for (int t = 1; t <= config.max_iters; ++t) {
        if (spread_of(states) < config.epsilon) break;
        RoundTrace trace = run_round(config.graph, config.faults, states, config.adversary, t,
                                     config.default_value, seed, exec);
        states = trace.states_after;
        summary.round_u_mu.emplace_back(trace.u_after, trace.mu_after);
        result.traces.push_back(std::move(trace));
    }

    summary.rounds = static_cast<int>(result.traces.size());
    summary.final_spread = spread_of(states);
    summary.converged = summary.final_spread < config.epsilon;
    summary.validity_ok = result.traces.empty() ? true : check_validity(result.traces);
    for (size_t p = 0; p < ff.size(); ++p)
        summary.final_states.push_back({ff[p], states[p]});
    return result;
}

bool check_validity(const std::vector<RoundTrace>& traces) {
    if (traces.empty()) throw ConfigError("check_validity: empty trace list");
    for (size_t k = 0; k < traces.size(); ++k) {
        const auto& tr = traces[k];
        if (tr.mu_after < tr.mu_before - rel_tol(tr.mu_after, tr.mu_before)) return false;
        if (tr.u_after > tr.u_before + rel_tol(tr.u_after, tr.u_before)) return false;
        if (k + 1 < traces.size()) {
            const auto& next = traces[k + 1];
            if (next.mu_before < tr.mu_after - rel_tol(next.mu_before, tr.mu_after)) return false;
            if (next.u_before > tr.u_after + rel_tol(next.u_before, tr.u_after)) return false;
        }
    }
    return true;
}

} // namespace iabc
