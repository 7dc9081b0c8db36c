#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "iabc/engine.hpp"
#include "iabc/matrix.hpp"

#include <nlohmann/json_fwd.hpp>

namespace iabc {

/// Shortest-width decimal rendering that round-trips (printf %.17g trimmed).
std::string fmt_double(double v);

DirectedGraph parse_graph(const nlohmann::json& j);
DirectedGraph load_graph(const std::string& path);

/// Scenario file: graph (inline object or path relative to the config file),
/// f, faulty, adversary {name, params, seed?}, inputs, epsilon, max_iters,
/// default_value, seed, optional out_dir.
struct ScenarioFile {
    ScenarioConfig config;
    std::string out_dir; // empty when unset
};

ScenarioFile load_scenario(const std::string& path);
ScenarioFile parse_scenario(const nlohmann::json& j, const std::string& base_dir);

/// CSV: t,node_id,value,u,mu,spread — one row per fault-free node per round.
void write_trace_csv(std::ostream& os, const std::vector<RoundTrace>& traces);

/// CSV: t,u,mu,spread for t = 0..rounds.
void write_plot_csv(std::ostream& os, const RunSummary& summary);

nlohmann::json summary_json(const RunSummary& summary);

/// One JSON document per line per round: t, rows as decimal strings, audit,
/// verification flags.
void write_matrices_jsonl(std::ostream& os, const std::vector<TransitionMatrix>& matrices);

nlohmann::json certificate_json(const ConvergenceReport& report);

} // namespace iabc
