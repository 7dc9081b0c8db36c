#include "doctest.h"

#include <cmath>

#include "iabc/engine.hpp"

#include "support.hpp"

using namespace iabc;

TEST_CASE("weight_a") {
    CHECK(weight_a(DirectedGraph::complete(4), 1, 1) == 0.5);      // in-degree 3, f=1
    CHECK(weight_a(DirectedGraph::complete(6), 0, 2) == 1.0 / 6);  // in-degree 5, f=0
    CHECK_THROWS_AS(weight_a(DirectedGraph::complete(3), 1, 1), ConfigError); // 2f values, empty kept set
    CHECK_THROWS_AS(weight_a(DirectedGraph(2, {{1, 2}}), 0, 1), ConfigError); // in-degree 0
}

TEST_CASE("alpha") {
    CHECK(alpha(DirectedGraph::complete(4), 1) == 0.5);
    // in-degrees 3 and 5 with f=1: min(1/2, 1/4) = 1/4
    const DirectedGraph g(6, {{2, 1}, {3, 1}, {4, 1},
                              {1, 2}, {3, 2}, {4, 2}, {5, 2}, {6, 2},
                              {1, 3}, {2, 3}, {4, 3},
                              {1, 4}, {2, 4}, {3, 4},
                              {1, 5}, {2, 5}, {3, 5},
                              {1, 6}, {2, 6}, {3, 6}});
    CHECK(g.in_degree(1) == 3);
    CHECK(g.in_degree(2) == 5);
    CHECK(alpha(g, 1) == 0.25);
}

TEST_CASE("trim") {
    SUBCASE("drops the extremes") {
        RoundInbox inbox{1, {{2, 1.0}, {3, 5.0}, {4, 9.0}}};
        const auto out = trim(inbox, 1);
        CHECK(out.removed_small == std::vector<int>{2});
        CHECK(out.removed_large == std::vector<int>{4});
        CHECK(out.kept == std::vector<int>{3});
        CHECK(out.kept_value_of(3) == 5.0);
    }
    SUBCASE("ties break by sender id") {
        RoundInbox inbox{1, {{2, 5.0}, {3, 5.0}, {4, 5.0}}};
        const auto out = trim(inbox, 1);
        CHECK(out.removed_small == std::vector<int>{2});
        CHECK(out.removed_large == std::vector<int>{4});
        CHECK(out.kept == std::vector<int>{3});
    }
    SUBCASE("f=0 keeps everything") {
        RoundInbox inbox{1, {{2, 3.0}, {3, -1.0}}};
        const auto out = trim(inbox, 0);
        CHECK(out.kept == std::vector<int>{2, 3});
        CHECK(out.removed_small.empty());
        CHECK(out.removed_large.empty());
    }
    SUBCASE("too few entries") {
        RoundInbox inbox{1, {{2, 1.0}, {3, 2.0}}};
        CHECK_THROWS_AS(trim(inbox, 1), ConfigError);
    }
}

TEST_CASE("update_value") {
    TrimOutcome one;
    one.kept = {3};
    one.kept_values = {{3, 5.0}};
    CHECK(update_value(3.0, one, 0.5) == 4.0);
    CHECK_THROWS_AS(update_value(3.0, one, 0.25), ConfigError); // a != 1/(|kept|+1)

    TrimOutcome zeros;
    zeros.kept = {2, 3, 4};
    zeros.kept_values = {{2, 0.0}, {3, 0.0}, {4, 0.0}};
    CHECK(update_value(0.0, zeros, 0.25) == 0.0);
}

TEST_CASE("run_round on the hand-worked K4 fixture") {
    const auto g = DirectedGraph::complete(4);
    const FaultConfig fc(1, {4});
    const std::vector<double> states{0.0, 6.0, 12.0};

    SUBCASE("constant 100 gets trimmed everywhere") {
        AdversarySpec adv{"constant", {{"value", 100.0}}, {}};
        const auto tr = run_round(g, fc, states, adv, 1, 0.0, 0);
        CHECK(tr.states_after == std::vector<double>{6.0, 9.0, 9.0});
        // node 1 drops {2:6} and {4:100}, keeps {3:12}
        CHECK(tr.trims[0].removed_small == std::vector<int>{2});
        CHECK(tr.trims[0].removed_large == std::vector<int>{4});
        CHECK(tr.trims[0].kept == std::vector<int>{3});
        CHECK(tr.u_after == 9.0);
        CHECK(tr.mu_after == 6.0);
    }
    SUBCASE("constant 7 survives node 1's trim") {
        AdversarySpec adv{"constant", {{"value", 7.0}}, {}};
        const auto tr = run_round(g, fc, states, adv, 1, 0.0, 0);
        CHECK(tr.states_after[0] == 3.5);
        CHECK(tr.trims[0].kept == std::vector<int>{4});
        CHECK(tr.trims[0].kept_value_of(4) == 7.0);
    }
    SUBCASE("silent adversary leaves the default value") {
        AdversarySpec adv{"silent", {}, {}};
        const auto tr = run_round(g, fc, states, adv, 1, -3.0, 0);
        CHECK(tr.inboxes[0].value_from(4) == -3.0);
    }
}

TEST_CASE("consensus fixed point: equal states stay put") {
    const auto g = testsupport::three_cycle();
    const FaultConfig fc(0, {});
    const std::vector<double> states{2.5, 2.5, 2.5};
    const auto tr = run_round(g, fc, states, {"silent", {}, {}}, 1, 0.0, 0);
    CHECK(tr.states_after == states);
}

TEST_CASE("run_scenario") {
    SUBCASE("K4 fixture converges under any built-in adversary") {
        auto cfg = testsupport::k4_scenario({"constant", {{"value", 100.0}}, {}});
        const auto result = run_scenario(cfg);
        CHECK(result.summary.converged);
        CHECK(result.summary.final_spread < cfg.epsilon);
        CHECK(result.summary.validity_ok);
        CHECK(result.summary.rounds > 0);
    }
    SUBCASE("identical inputs terminate without a round") {
        ScenarioConfig cfg{testsupport::three_cycle(), FaultConfig(0, {}), {"silent", {}, {}},
                           {1.0, 1.0, 1.0}};
        const auto result = run_scenario(cfg);
        CHECK(result.summary.rounds == 0);
        CHECK(result.summary.converged);
    }
    SUBCASE("degree condition gates execution") {
        ScenarioConfig cfg{DirectedGraph::complete(3), FaultConfig(1, {}), {"silent", {}, {}},
                           {0.0, 1.0, 2.0}};
        CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
    }
    SUBCASE("config validation") {
        ScenarioConfig bad_inputs{DirectedGraph::complete(4), FaultConfig(1, {4}), {"silent", {}, {}},
                                  {0.0, 1.0}};
        CHECK_THROWS_AS(run_scenario(bad_inputs), ConfigError);
        ScenarioConfig bad_adv{DirectedGraph::complete(4), FaultConfig(1, {4}), {"nope", {}, {}},
                               {0.0, 1.0, 2.0, 3.0}};
        CHECK_THROWS_AS(run_scenario(bad_adv), ConfigError);
        ScenarioConfig bad_faulty{DirectedGraph::complete(4), FaultConfig(1, {2, 4}), {"silent", {}, {}},
                                  {0.0, 1.0, 2.0, 3.0}};
        CHECK_THROWS_AS(run_scenario(bad_faulty), ConfigError);
    }
}

TEST_CASE("check_validity") {
    auto cfg = testsupport::k4_scenario({"boundary_push", {}, {}}, 7);
    auto result = run_scenario(cfg);
    REQUIRE_FALSE(result.traces.empty());
    CHECK(check_validity(result.traces));

    SUBCASE("a fabricated mu decrease fails") {
        auto broken = result.traces;
        broken.back().mu_after = broken.back().mu_before - 1.0;
        CHECK_FALSE(check_validity(broken));
    }
    SUBCASE("a fabricated U increase fails") {
        auto broken = result.traces;
        broken.front().u_after = broken.front().u_before + 1.0;
        CHECK_FALSE(check_validity(broken));
    }
    SUBCASE("single round") {
        CHECK(check_validity({result.traces.front()}));
    }
    CHECK_THROWS_AS(check_validity({}), ConfigError);
}

TEST_CASE("containment and trim-window properties on random scenarios") {
    testsupport::Rng rng(0x5EED);
    for (int round = 0; round < 15; ++round) {
        const auto cfg = testsupport::random_condition_scenario(rng);
        const auto result = run_scenario(cfg);
        for (const auto& tr : result.traces) {
            for (size_t p = 0; p < tr.ff_ids.size(); ++p) {
                const double v = tr.states_after[p];
                CHECK(v >= tr.mu_before - 1e-12);
                CHECK(v <= tr.u_before + 1e-12);
                const auto& trm = tr.trims[p];
                if (!trm.removed_small.empty()) {
                    double smax = -1e300, lmin = 1e300;
                    for (int id : trm.removed_small)
                        smax = std::max(smax, tr.inboxes[p].value_from(id));
                    for (int id : trm.removed_large)
                        lmin = std::min(lmin, tr.inboxes[p].value_from(id));
                    for (const auto& [k, w] : trm.kept_values) {
                        CHECK(w >= smax);
                        CHECK(w <= lmin);
                    }
                }
            }
        }
    }
}

TEST_CASE("identical seeds reproduce identical runs") {
    testsupport::Rng rng(0xD0D0);
    const auto cfg = testsupport::random_condition_scenario(rng);
    const auto a = run_scenario(cfg);
    const auto b = run_scenario(cfg);
    REQUIRE(a.traces.size() == b.traces.size());
    for (size_t t = 0; t < a.traces.size(); ++t) {
        CHECK(a.traces[t].states_after == b.traces[t].states_after);
        for (size_t p = 0; p < a.traces[t].inboxes.size(); ++p)
            CHECK(a.traces[t].inboxes[p].entries == b.traces[t].inboxes[p].entries);
    }
}
