#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iabc/io.hpp"

#include "support.hpp"

using namespace iabc;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / ("iabc_io_test_" + std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("fmt_double round-trips and stays short") {
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(6.0) == "6");
    CHECK(fmt_double(0.0) == "0");
    for (double v : {1.0 / 3, 5.0 / 12, 1e-300, -2.75, 3.5e17}) {
        CHECK(std::strtod(fmt_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("graph parsing") {
    const json good = {{"n", 4}, {"edges", {{1, 2}, {2, 1}, {3, 4}}}};
    const auto g = parse_graph(good);
    CHECK(g.n() == 4);
    CHECK(g.has_edge(3, 4));

    CHECK_THROWS_AS(parse_graph(json{{"n", 2}, {"edges", {{1, 1}}}}), ConfigError);
    CHECK_THROWS_AS(parse_graph(json{{"n", 2}, {"edges", {{1, 5}}}}), ConfigError);
    CHECK_THROWS_AS(parse_graph(json{{"edges", json::array()}}), ConfigError);
    CHECK_THROWS_AS(parse_graph(json::array()), ConfigError);
}

TEST_CASE("scenario parsing") {
    const auto dir = temp_dir();
    {
        std::ofstream os(dir / "graph.json");
        os << R"({"n": 4, "edges": [[1,2],[1,3],[1,4],[2,1],[2,3],[2,4],[3,1],[3,2],[3,4],[4,1],[4,2],[4,3]]})";
    }
    json cfg = {{"graph", "graph.json"},
                {"f", 1},
                {"faulty", {4}},
                {"adversary", {{"name", "constant"}, {"params", {{"value", 100.0}}}, {"seed", 5}}},
                {"inputs", {0.0, 6.0, 12.0, 0.0}},
                {"epsilon", 1e-6},
                {"max_iters", 500},
                {"default_value", -1.0},
                {"seed", 42}};
    {
        std::ofstream os(dir / "scenario.json");
        os << cfg.dump();
    }
    const auto file = load_scenario((dir / "scenario.json").string());
    CHECK(file.config.graph.n() == 4);
    CHECK(file.config.faults.f == 1);
    CHECK(file.config.faults.faulty == std::vector<int>{4});
    CHECK(file.config.adversary.name == "constant");
    CHECK(file.config.adversary.params.at("value") == 100.0);
    CHECK(file.config.adversary.seed == uint64_t{5});
    CHECK(file.config.max_iters == 500);
    CHECK(file.config.default_value == -1.0);
    CHECK(file.config.seed == 42);

    SUBCASE("inline graph works too") {
        cfg["graph"] = json{{"n", 3}, {"edges", {{1, 2}, {2, 3}, {3, 1}}}};
        cfg["f"] = 0;
        cfg["faulty"] = json::array();
        cfg["inputs"] = {0.0, 1.0, 2.0};
        const auto inl = parse_scenario(cfg, "");
        CHECK(inl.config.graph.n() == 3);
    }
    SUBCASE("invariants enforced") {
        cfg["epsilon"] = 0.0;
        CHECK_THROWS_AS(parse_scenario(cfg, dir.string()), ConfigError);
        cfg["epsilon"] = 1e-6;
        cfg["inputs"] = {1.0};
        CHECK_THROWS_AS(parse_scenario(cfg, dir.string()), ConfigError);
    }
    SUBCASE("malformed json") {
        std::ofstream(dir / "broken.json") << "{ nope";
        CHECK_THROWS_AS(load_scenario((dir / "broken.json").string()), ConfigError);
        CHECK_THROWS_AS(load_graph((dir / "missing.json").string()), ConfigError);
    }
}

TEST_CASE("trace CSV layout on the K4 fixture") {
    auto cfg = testsupport::k4_scenario({"constant", {{"value", 100.0}}, {}});
    const auto result = run_scenario(cfg);
    std::ostringstream os;
    write_trace_csv(os, result.traces);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,node_id,value,u,mu,spread");
    std::getline(in, line);
    CHECK(line == "1,1,6,9,6,3");
    std::getline(in, line);
    CHECK(line == "1,2,9,9,6,3");
    std::getline(in, line);
    CHECK(line == "1,3,9,9,6,3");

    std::ostringstream plot;
    write_plot_csv(plot, result.summary);
    std::istringstream pin(plot.str());
    std::getline(pin, line);
    CHECK(line == "t,u,mu,spread");
    std::getline(pin, line);
    CHECK(line == "0,12,0,12");
}

TEST_CASE("matrix dump carries rows as decimal strings plus the audit") {
    auto cfg = testsupport::k4_scenario({"constant", {{"value", 7.0}}, {}});
    const auto result = run_scenario(cfg);
    const auto tm = build_transition_matrix(result.traces.front(), cfg.faults,
                                            beta(cfg.graph, cfg.faults.f));
    std::ostringstream os;
    write_matrices_jsonl(os, {tm});
    const auto j = json::parse(os.str());
    CHECK(j["t"] == 1);
    CHECK(j["rows"][0][0] == "0.5");
    CHECK(j["verified"] == true);
    REQUIRE(j["audits"].is_array());
    CHECK(j["audits"][0]["node"] == 1);
    CHECK(j["audits"][0]["delta"] == 1);
    CHECK(j["conditions"][0]["stochastic"] == true);
}
