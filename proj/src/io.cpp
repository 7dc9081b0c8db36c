#include "iabc/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace iabc {

using nlohmann::json;

std::string fmt_double(double v) {
    // shortest decimal that round-trips, stable across runs
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_file(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

template <typename T>
T get_field(const json& j, const std::string& key, const char* what) {
    if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": field '" + key + "': " + e.what());
    }
}

} // namespace

DirectedGraph parse_graph(const json& j) {
    if (!j.is_object()) throw ConfigError("graph: expected an object with 'n' and 'edges'");
    const int n = get_field<int>(j, "n", "graph");
    const auto edge_list = get_field<std::vector<std::vector<int>>>(j, "edges", "graph");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(edge_list.size());
    for (const auto& e : edge_list) {
        if (e.size() != 2) throw ConfigError("graph: each edge must be a [from, to] pair");
        edges.emplace_back(e[0], e[1]);
    }
    return DirectedGraph(n, std::move(edges));
}

DirectedGraph load_graph(const std::string& path) { return parse_graph(parse_json_file(path)); }

ScenarioFile parse_scenario(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");

    DirectedGraph graph = [&] {
        if (!j.contains("graph")) throw ConfigError("scenario: missing field 'graph'");
        const auto& jg = j.at("graph");
        if (jg.is_string()) {
            std::filesystem::path p = jg.get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
            return load_graph(p.string());
        }
        return parse_graph(jg);
    }();

    const int f = get_field<int>(j, "f", "scenario");
    std::vector<int> faulty;
    if (j.contains("faulty")) faulty = get_field<std::vector<int>>(j, "faulty", "scenario");

    AdversarySpec adv;
    if (j.contains("adversary")) {
        const auto& ja = j.at("adversary");
        if (!ja.is_object()) throw ConfigError("scenario: 'adversary' must be an object");
        adv.name = get_field<std::string>(ja, "name", "adversary");
        if (ja.contains("params"))
            adv.params = get_field<std::map<std::string, double>>(ja, "params", "adversary");
        if (ja.contains("seed")) adv.seed = get_field<uint64_t>(ja, "seed", "adversary");
    }

    ScenarioFile file{ScenarioConfig{std::move(graph), FaultConfig(f, std::move(faulty)), std::move(adv),
                                     get_field<std::vector<double>>(j, "inputs", "scenario")},
                      {}};
    ScenarioConfig& cfg = file.config;
    if (j.contains("epsilon")) cfg.epsilon = get_field<double>(j, "epsilon", "scenario");
    if (j.contains("max_iters")) cfg.max_iters = get_field<int>(j, "max_iters", "scenario");
    if (j.contains("default_value")) cfg.default_value = get_field<double>(j, "default_value", "scenario");
    if (j.contains("seed")) cfg.seed = get_field<uint64_t>(j, "seed", "scenario");
    if (j.contains("out_dir")) file.out_dir = get_field<std::string>(j, "out_dir", "scenario");
    cfg.validate();
    return file;
}

ScenarioFile load_scenario(const std::string& path) {
    const std::string dir = std::filesystem::path(path).parent_path().string();
    return parse_scenario(parse_json_file(path), dir);
}

void write_trace_csv(std::ostream& os, const std::vector<RoundTrace>& traces) {
    os << "t,node_id,value,u,mu,spread\n";
    for (const auto& tr : traces) {
        const double spread = tr.u_after - tr.mu_after;
        for (size_t p = 0; p < tr.ff_ids.size(); ++p)
            os << tr.t << ',' << tr.ff_ids[p] << ',' << fmt_double(tr.states_after[p]) << ','
               << fmt_double(tr.u_after) << ',' << fmt_double(tr.mu_after) << ','
               << fmt_double(spread) << '\n';
    }
}

void write_plot_csv(std::ostream& os, const RunSummary& summary) {
    os << "t,u,mu,spread\n";
    os << "0," << fmt_double(summary.u0) << ',' << fmt_double(summary.mu0) << ','
       << fmt_double(summary.u0 - summary.mu0) << '\n';
    for (size_t t = 0; t < summary.round_u_mu.size(); ++t) {
        const auto& [u, mu] = summary.round_u_mu[t];
        os << (t + 1) << ',' << fmt_double(u) << ',' << fmt_double(mu) << ','
           << fmt_double(u - mu) << '\n';
    }
}

json summary_json(const RunSummary& summary) {
    json j;
    j["rounds"] = summary.rounds;
    j["converged"] = summary.converged;
    j["final_spread"] = summary.final_spread;
    j["validity_ok"] = summary.validity_ok;
    j["u0"] = summary.u0;
    j["mu0"] = summary.mu0;
    json finals = json::array();
    for (const auto& st : summary.final_states)
        finals.push_back({{"node", st.node_id}, {"value", st.value}});
    j["final_states"] = std::move(finals);
    return j;
}

void write_matrices_jsonl(std::ostream& os, const std::vector<TransitionMatrix>& matrices) {
    for (const auto& tm : matrices) {
        const int q = tm.m.dim;
        json j;
        j["t"] = tm.t;
        j["nodes"] = tm.ff_ids;
        json rows = json::array();
        for (int i = 0; i < q; ++i) {
            json row = json::array();
            for (int jc = 0; jc < q; ++jc) row.push_back(fmt_double(tm.m.at(i, jc)));
            rows.push_back(std::move(row));
        }
        j["rows"] = std::move(rows);
        json audits = json::array();
        for (const auto& aud : tm.audits) {
            json decos = json::array();
            for (const auto& d : aud.decompositions)
                decos.push_back({{"k", d.k}, {"l", d.l}, {"s", d.s}, {"lambda", d.lambda}, {"psi", d.psi}});
            audits.push_back({{"node", aud.node},
                              {"trimmed_case", aud.trimmed_case},
                              {"delta", aud.delta},
                              {"delta_C", aud.delta_C},
                              {"l_star", aud.l_star},
                              {"s_star", aud.s_star},
                              {"decompositions", std::move(decos)},
                              {"reproduction_error", aud.reproduction_error}});
        }
        j["audits"] = std::move(audits);
        json conds = json::array();
        for (const auto& c : tm.conditions)
            conds.push_back({{"stochastic", c.stochastic},
                             {"diagonal", c.diagonal},
                             {"zero_pattern", c.zero_pattern},
                             {"nontrivial", c.nontrivial},
                             {"nontrivial_count", c.nontrivial_count}});
        j["conditions"] = std::move(conds);
        j["verified"] = tm.verified;
        os << j.dump() << '\n';
    }
}

json certificate_json(const ConvergenceReport& report) {
    json j;
    j["ok"] = report.ok;
    j["validity_ok"] = report.validity_ok;
    j["matrices_ok"] = report.matrices_ok;
    j["rounds_verified"] = report.rounds_verified;
    j["n_minus_phi"] = report.n_minus_phi;
    j["tau"] = report.tau;
    j["block_len"] = report.block_len;
    j["completed_blocks"] = report.completed_blocks;
    j["spread_bound_ok"] = report.spread_bound_ok;
    j["spread_ratio"] = report.spread_ratio;
    j["lambda_product"] = report.lambda_product;
    j["converged"] = report.converged;
    j["final_spread"] = report.final_spread;
    j["consensus_value"] = report.consensus_value;
    j["within_epsilon"] = report.within_epsilon;
    if (!report.first_failure.empty()) j["first_failure"] = report.first_failure;
    if (report.blocks) {
        const auto& cert = *report.blocks;
        json blocks = json::array();
        for (const auto& bc : cert.blocks)
            blocks.push_back({{"block", bc.block},
                              {"lambda", bc.lambda},
                              {"delta", bc.delta},
                              {"stochastic", bc.stochastic},
                              {"scrambling", bc.scrambling},
                              {"bound_ok", bc.bound_ok},
                              {"column", bc.column},
                              {"column_min", bc.column_min},
                              {"column_ok", bc.column_ok}});
        j["block_certificate"] = {{"tau", cert.tau},
                                  {"block_len", cert.block_len},
                                  {"beta", cert.beta_bound},
                                  {"beta_pow", cert.beta_pow},
                                  {"ok", cert.ok},
                                  {"blocks", std::move(blocks)}};
    }
    return j;
}

} // namespace iabc
