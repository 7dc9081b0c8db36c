#pragma once

// Shared fixtures, generators, and independent oracles for the test suites.
// Oracles are written as plain loops, independent of the library's
// implementation paths.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "iabc/engine.hpp"
#include "iabc/matrix.hpp"
#include "iabc/reduced.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline double urand(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// ---- fixtures ----------------------------------------------------------

inline iabc::ScenarioConfig k4_scenario(const iabc::AdversarySpec& adv, uint64_t seed = 0) {
    iabc::ScenarioConfig cfg{iabc::DirectedGraph::complete(4), iabc::FaultConfig(1, {4}), adv,
                             {0.0, 6.0, 12.0, 0.0}};
    cfg.seed = seed;
    return cfg;
}

inline iabc::DirectedGraph three_cycle() { return iabc::DirectedGraph(3, {{1, 2}, {2, 3}, {3, 1}}); }

// ---- random generation -------------------------------------------------

inline iabc::Matrix random_stochastic(Rng& rng, int dim) {
    iabc::Matrix m(dim);
    for (int i = 0; i < dim; ++i) {
        double sum = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double v = urand(rng, 0.0, 1.0);
            m.at(i, j) = v;
            sum += v;
        }
        for (int j = 0; j < dim; ++j) m.at(i, j) /= sum;
    }
    return m;
}

inline iabc::DirectedGraph random_digraph(Rng& rng, int n, double p, int min_indeg) {
    std::vector<std::pair<int, int>> edges;
    std::vector<int> indeg(static_cast<size_t>(n), 0);
    for (int from = 1; from <= n; ++from)
        for (int to = 1; to <= n; ++to)
            if (from != to && urand(rng, 0.0, 1.0) < p) {
                edges.emplace_back(from, to);
                ++indeg[static_cast<size_t>(to - 1)];
            }
    for (int to = 1; to <= n; ++to) {
        if (indeg[static_cast<size_t>(to - 1)] >= min_indeg) continue;
        std::vector<int> missing;
        for (int from = 1; from <= n; ++from)
            if (from != to &&
                std::find(edges.begin(), edges.end(), std::make_pair(from, to)) == edges.end())
                missing.push_back(from);
        std::shuffle(missing.begin(), missing.end(), rng);
        while (indeg[static_cast<size_t>(to - 1)] < min_indeg && !missing.empty()) {
            edges.emplace_back(missing.back(), to);
            missing.pop_back();
            ++indeg[static_cast<size_t>(to - 1)];
        }
    }
    return iabc::DirectedGraph(n, std::move(edges));
}

inline iabc::AdversarySpec random_adversary(Rng& rng) {
    iabc::AdversarySpec spec;
    switch (rng() % 5) {
        case 0: spec.name = "silent"; break;
        case 1:
            spec.name = "constant";
            spec.params["value"] = urand(rng, -0.5, 1.5);
            break;
        case 2:
            spec.name = "boundary_push";
            spec.params["delta"] = urand(rng, 0.1, 2.0);
            break;
        case 3: spec.name = "split_random"; break;
        default: spec.name = "mimic_extreme"; break;
    }
    return spec;
}

// Random scenario on a graph that satisfies the degree and sufficiency
// conditions: f in {0,1,2}, n <= 8, inputs in [0,1].
inline iabc::ScenarioConfig random_condition_scenario(Rng& rng) {
    const int f = static_cast<int>(rng() % 3);
    const int n_lo = f == 0 ? 3 : f == 1 ? 4 : 7;
    const int n = n_lo + static_cast<int>(rng() % static_cast<uint64_t>(8 - n_lo + 1));

    iabc::DirectedGraph graph = iabc::DirectedGraph::complete(n);
    for (int attempt = 0; attempt < 50; ++attempt) {
        iabc::DirectedGraph candidate =
            random_digraph(rng, n, urand(rng, 0.55, 0.95), std::max(1, 2 * f + 1));
        if (!iabc::check_degree_condition(candidate, f).ok) continue;
        if (f == 0) {
            bool no_sink = true;
            for (int i = 1; i <= n; ++i) no_sink = no_sink && candidate.in_degree(i) >= 1;
            if (!no_sink) continue;
        }
        if (iabc::check_sufficiency_condition(candidate, f, iabc::SufficiencyMethod::SourceSets).ok) {
            graph = std::move(candidate);
            break;
        }
    }

    const int phi = f == 0 ? 0 : static_cast<int>(rng() % static_cast<uint64_t>(f + 1));
    std::vector<int> ids(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<size_t>(i)] = i + 1;
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<int> faulty(ids.begin(), ids.begin() + phi);

    std::vector<double> inputs(static_cast<size_t>(n));
    for (auto& v : inputs) v = urand(rng, 0.0, 1.0);

    iabc::ScenarioConfig cfg{std::move(graph), iabc::FaultConfig(f, std::move(faulty)),
                             random_adversary(rng), std::move(inputs)};
    cfg.seed = rng();
    return cfg;
}

// ---- oracles ------------------------------------------------------------

inline double brute_delta(const iabc::Matrix& m) {
    double best = 0.0;
    for (int j = 0; j < m.dim; ++j)
        for (int i1 = 0; i1 < m.dim; ++i1)
            for (int i2 = 0; i2 < m.dim; ++i2)
                best = std::max(best, std::fabs(m.at(i1, j) - m.at(i2, j)));
    return best;
}

inline double brute_lambda(const iabc::Matrix& m) {
    if (m.dim < 2) return 0.0;
    double min_shared = 2.0;
    for (int i1 = 0; i1 < m.dim; ++i1)
        for (int i2 = i1 + 1; i2 < m.dim; ++i2) {
            double s = 0.0;
            for (int j = 0; j < m.dim; ++j) s += std::min(m.at(i1, j), m.at(i2, j));
            min_shared = std::min(min_shared, s);
        }
    return std::clamp(1.0 - min_shared, 0.0, 1.0);
}

// Reachability within at most p hops (diagonal included), by depth-limited
// expansion; independent of the boolean matrix-power path.
inline bool reaches_all_within(const iabc::ReducedGraph& h, int from_pos, int p) {
    const size_t q = h.nodes.size();
    std::vector<char> reach(q, 0);
    reach[static_cast<size_t>(from_pos)] = 1;
    for (int step = 0; step < p; ++step) {
        std::vector<char> next = reach;
        for (size_t i = 0; i < q; ++i)
            for (int j : h.kept_in[i]) {
                const int jp = h.index_of(j);
                if (reach[static_cast<size_t>(jp)]) next[i] = 1;
            }
        reach = std::move(next);
    }
    for (char c : reach)
        if (!c) return false;
    return true;
}

} // namespace testsupport
