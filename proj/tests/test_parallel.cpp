#include "doctest.h"

// The OpenMP kernels must match the serial reference bit for bit: each
// parallel item writes its own slot and the reductions are exact.

#include "iabc/engine.hpp"
#include "iabc/matrix.hpp"
#include "iabc/reduced.hpp"

#include "support.hpp"

using namespace iabc;

TEST_CASE("run_round: parallel equals serial") {
    testsupport::Rng rng(0x7777);
    for (int round = 0; round < 10; ++round) {
        const auto cfg = testsupport::random_condition_scenario(rng);
        const auto ff = cfg.faults.fault_free(cfg.graph);
        std::vector<double> states;
        for (int id : ff) states.push_back(cfg.inputs[static_cast<size_t>(id - 1)]);
        const auto serial = run_round(cfg.graph, cfg.faults, states, cfg.adversary, 1,
                                      cfg.default_value, cfg.seed, Exec::Serial);
        const auto parallel = run_round(cfg.graph, cfg.faults, states, cfg.adversary, 1,
                                        cfg.default_value, cfg.seed, Exec::Parallel);
        CHECK(serial.states_after == parallel.states_after);
        CHECK(serial.u_after == parallel.u_after);
        for (size_t p = 0; p < serial.inboxes.size(); ++p) {
            CHECK(serial.inboxes[p].entries == parallel.inboxes[p].entries);
            CHECK(serial.trims[p].kept == parallel.trims[p].kept);
        }
    }
}

TEST_CASE("run_scenario: parallel node updates do not change the run") {
    testsupport::Rng rng(0x8888);
    const auto cfg = testsupport::random_condition_scenario(rng);
    const auto a = run_scenario(cfg, Exec::Serial);
    const auto b = run_scenario(cfg, Exec::Parallel);
    REQUIRE(a.traces.size() == b.traces.size());
    for (size_t t = 0; t < a.traces.size(); ++t)
        CHECK(a.traces[t].states_after == b.traces[t].states_after);
    CHECK(a.summary.final_spread == b.summary.final_spread);
}

TEST_CASE("ergodicity: parallel equals serial") {
    testsupport::Rng rng(0x9999);
    for (int round = 0; round < 50; ++round) {
        const auto m = testsupport::random_stochastic(rng, 2 + static_cast<int>(rng() % 30));
        const auto s = ergodicity(m, Exec::Serial);
        const auto p = ergodicity(m, Exec::Parallel);
        CHECK(s.delta == p.delta);
        CHECK(s.lambda_coeff == p.lambda_coeff);
    }
}

TEST_CASE("sufficiency scan: parallel equals serial, witness included") {
    testsupport::Rng rng(0xAAAA);
    for (int round = 0; round < 12; ++round) {
        const int n = 3 + static_cast<int>(rng() % 4);
        const int f = static_cast<int>(rng() % 3);
        const auto g = testsupport::random_digraph(rng, n, testsupport::urand(rng, 0.3, 0.9), 0);
        const auto s = check_sufficiency_condition(g, f, SufficiencyMethod::Auto, Exec::Serial);
        const auto p = check_sufficiency_condition(g, f, SufficiencyMethod::Auto, Exec::Parallel);
        CHECK(s.ok == p.ok);
        if (!s.ok) {
            CHECK(s.witness->faulty == p.witness->faulty);
            CHECK(s.witness->h == p.witness->h);
        }
    }
}

TEST_CASE("matrix construction and block products: parallel equals serial") {
    auto cfg = testsupport::k4_scenario({"split_random", {}, {}}, 31337);
    const FaultConfig& fc = cfg.faults;
    std::vector<double> states{0.0, 6.0, 12.0};
    std::vector<RoundTrace> traces;
    for (int t = 1; t <= 48; ++t) {
        traces.push_back(run_round(cfg.graph, fc, states, cfg.adversary, t, 0.0, cfg.seed));
        states = traces.back().states_after;
    }
    const double b = beta(cfg.graph, fc.f);
    std::vector<TransitionMatrix> ms, mp;
    for (const auto& tr : traces) {
        ms.push_back(build_transition_matrix(tr, fc, b, Exec::Serial));
        mp.push_back(build_transition_matrix(tr, fc, b, Exec::Parallel));
    }
    for (size_t t = 0; t < ms.size(); ++t) CHECK(ms[t].m.data == mp[t].m.data);

    const auto cs = block_product_certificate(ms, cfg.graph, fc, Exec::Serial);
    const auto cp = block_product_certificate(ms, cfg.graph, fc, Exec::Parallel);
    REQUIRE(cs.blocks.size() == cp.blocks.size());
    for (size_t i = 0; i < cs.blocks.size(); ++i) {
        CHECK(cs.blocks[i].lambda == cp.blocks[i].lambda);
        CHECK(cs.blocks[i].column == cp.blocks[i].column);
    }
    CHECK(cs.ok == cp.ok);
}
