#include "iabc/reduced.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>

namespace iabc {
namespace {

uint64_t sat_mul(uint64_t a, uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<uint64_t>::max() / b) return std::numeric_limits<uint64_t>::max();
    return a * b;
}

uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (r > std::numeric_limits<uint64_t>::max()) return std::numeric_limits<uint64_t>::max();
    }
    return static_cast<uint64_t>(r);
}

// Surviving in-neighbors (fault-free only) of each fault-free node.
std::vector<std::vector<int>> surviving_in(const DirectedGraph& g, const FaultConfig& fc,
                                           const std::vector<int>& ff) {
    std::vector<std::vector<int>> surv(ff.size());
    for (size_t p = 0; p < ff.size(); ++p) {
        for (int j : g.in_neighbors(ff[p]))
            if (!fc.is_faulty(j)) surv[p].push_back(j);
    }
    return surv;
}

// All size-k subsets of `pool` (already sorted) in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(const std::vector<int>& pool, int k) {
    std::vector<std::vector<int>> out;
    const int n = static_cast<int>(pool.size());
    if (k < 0 || k > n) return out;
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        std::vector<int> sub(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) sub[static_cast<size_t>(i)] = pool[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        out.push_back(std::move(sub));
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    return out;
}

// Kept-set choices per fault-free node: all subsets of the surviving
// in-neighbors of size (surviving - min(f, surviving)).
std::vector<std::vector<std::vector<int>>> kept_choices(const std::vector<std::vector<int>>& surv,
                                                        int f) {
    std::vector<std::vector<std::vector<int>>> choices(surv.size());
    for (size_t p = 0; p < surv.size(); ++p) {
        const int s = static_cast<int>(surv[p].size());
        choices[p] = subsets_of_size(surv[p], s - std::min(f, s));
    }
    return choices;
}

// Walks the cartesian product of kept choices (last node varying fastest),
// calling fn with each reduced graph until fn returns true. Returns the
// first graph for which fn returned true.
template <typename Fn>
std::optional<ReducedGraph> scan_reduced_graphs(const std::vector<int>& ff,
                                                const std::vector<std::vector<std::vector<int>>>& choices,
                                                Fn&& fn) {
    const size_t q = ff.size();
    std::vector<size_t> odo(q, 0);
    while (true) {
        ReducedGraph h;
        h.nodes = ff;
        h.kept_in.resize(q);
        for (size_t p = 0; p < q; ++p) h.kept_in[p] = choices[p][odo[p]];
        if (fn(h)) return h;
        size_t p = q;
        while (p > 0) {
            --p;
            if (++odo[p] < choices[p].size()) break;
            odo[p] = 0;
            if (p == 0) return std::nullopt;
        }
        if (q == 0) return std::nullopt;
    }
}

} // namespace

int ReducedGraph::index_of(int id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id) return -1;
    return static_cast<int>(it - nodes.begin());
}

const std::vector<int>& ReducedGraph::kept_in_of(int id) const {
    const int p = index_of(id);
    if (p < 0) throw ConfigError("reduced graph: node " + std::to_string(id) + " not present");
    return kept_in[static_cast<size_t>(p)];
}

uint64_t reduced_graph_count(const DirectedGraph& g, const FaultConfig& fc) {
    fc.validate(g);
    const auto ff = fc.fault_free(g);
    const auto surv = surviving_in(g, fc, ff);
    uint64_t tau = 1;
    for (const auto& s : surv) {
        const int sz = static_cast<int>(s.size());
        tau = sat_mul(tau, binomial(sz, std::min(fc.f, sz)));
    }
    return tau;
}

std::vector<ReducedGraph> enumerate_reduced_graphs(const DirectedGraph& g, const FaultConfig& fc,
                                                   uint64_t limit) {
    fc.validate(g);
    const uint64_t tau = reduced_graph_count(g, fc);
    if (tau > limit)
        throw ConfigError("R_F has " + std::to_string(tau) + " elements, above the materialization limit of " +
                          std::to_string(limit));
    const auto ff = fc.fault_free(g);
    const auto choices = kept_choices(surviving_in(g, fc, ff), fc.f);
    std::vector<ReducedGraph> out;
    out.reserve(tau);
    scan_reduced_graphs(ff, choices, [&](const ReducedGraph& h) {
        out.push_back(h);
        return false;
    });
    return out;
}

std::optional<int> root_exists(const ReducedGraph& h) {
    const size_t q = h.nodes.size();
    if (q == 0) return std::nullopt;
    // out-adjacency by position
    std::vector<std::vector<int>> out_adj(q);
    for (size_t p = 0; p < q; ++p)
        for (int j : h.kept_in[p]) out_adj[static_cast<size_t>(h.index_of(j))].push_back(static_cast<int>(p));
    std::vector<int> stack;
    std::vector<char> seen(q);
    for (size_t start = 0; start < q; ++start) {
        std::fill(seen.begin(), seen.end(), 0);
        stack.assign(1, static_cast<int>(start));
        seen[start] = 1;
        size_t reached = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : out_adj[static_cast<size_t>(v)])
                if (!seen[static_cast<size_t>(w)]) {
                    seen[static_cast<size_t>(w)] = 1;
                    ++reached;
                    stack.push_back(w);
                }
        }
        if (reached == q) return h.nodes[start];
    }
    return std::nullopt;
}

ConnectivityMatrix connectivity_matrix(const ReducedGraph& h) {
    ConnectivityMatrix m;
    m.dim = static_cast<int>(h.nodes.size());
    m.nodes = h.nodes;
    m.a.assign(static_cast<size_t>(m.dim) * m.dim, 0);
    for (int i = 0; i < m.dim; ++i) {
        m.at(i, i) = 1;
        for (int j : h.kept_in[static_cast<size_t>(i)]) m.at(i, h.index_of(j)) = 1;
    }
    return m;
}

ConnectivityMatrix boolean_power(const ConnectivityMatrix& m, int p) {
    if (p < 1) throw ConfigError("boolean_power: exponent must be >= 1");
    ConnectivityMatrix acc = m;
    for (int step = 1; step < p; ++step) {
        ConnectivityMatrix next = acc;
        for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j) {
                uint8_t v = 0;
                for (int k = 0; k < m.dim; ++k)
                    if (acc.at(i, k) && m.at(k, j)) {
                        v = 1;
                        break;
                    }
                next.at(i, j) = v;
            }
        acc = std::move(next);
    }
    return acc;
}

std::optional<int> has_nonzero_column_in_power(const ConnectivityMatrix& m, int p) {
    const ConnectivityMatrix pw = boolean_power(m, p);
    for (int j = 0; j < pw.dim; ++j) {
        bool all = true;
        for (int i = 0; i < pw.dim; ++i)
            if (!pw.at(i, j)) {
                all = false;
                break;
            }
        if (all) return pw.nodes[static_cast<size_t>(j)];
    }
    return std::nullopt;
}

namespace {

// Rootless witness from a pair of sets that can both be made incoming-free:
// remove every surviving in-edge entering A from outside A (padding removals
// with the largest inside ids), likewise for B; elsewhere keep the smallest ids.
ReducedGraph witness_from_source_sets(const std::vector<int>& ff,
                                      const std::vector<std::vector<int>>& surv, int f,
                                      uint32_t mask_a, uint32_t mask_b) {
    ReducedGraph h;
    h.nodes = ff;
    h.kept_in.resize(ff.size());
    auto pos_of = [&](int id) {
        return static_cast<size_t>(std::lower_bound(ff.begin(), ff.end(), id) - ff.begin());
    };
    for (size_t p = 0; p < ff.size(); ++p) {
        const auto& s = surv[p];
        const int keep_cnt = static_cast<int>(s.size()) - std::min<int>(f, static_cast<int>(s.size()));
        const bool in_a = (mask_a >> p) & 1u, in_b = (mask_b >> p) & 1u;
        std::vector<int> kept;
        if (in_a || in_b) {
            const uint32_t side = in_a ? mask_a : mask_b;
            for (int j : s)
                if ((side >> pos_of(j)) & 1u) kept.push_back(j);
            // pad removals from the inside edges, dropping the largest ids
            while (static_cast<int>(kept.size()) > keep_cnt) kept.pop_back();
        } else {
            kept.assign(s.begin(), s.begin() + keep_cnt);
        }
        h.kept_in[p] = std::move(kept);
    }
    return h;
}

std::optional<ReducedGraph> rootless_by_source_sets(const std::vector<int>& ff,
                                                    const std::vector<std::vector<int>>& surv, int f) {
    const int q = static_cast<int>(ff.size());
    if (q < 2) return std::nullopt;
    if (q > 26) throw ConfigError("source-set sufficiency scan limited to 26 fault-free nodes");
    std::vector<uint32_t> surv_mask(static_cast<size_t>(q), 0);
    for (size_t p = 0; p < ff.size(); ++p)
        for (int j : surv[p]) {
            const size_t jp = static_cast<size_t>(std::lower_bound(ff.begin(), ff.end(), j) - ff.begin());
            surv_mask[p] |= 1u << jp;
        }
    const uint32_t full = (q == 32) ? ~0u : ((1u << q) - 1u);
    auto isolable = [&](uint32_t x) {
        for (uint32_t rest = x; rest;) {
            const int p = std::countr_zero(rest);
            rest &= rest - 1;
            if (std::popcount(surv_mask[static_cast<size_t>(p)] & ~x) > f) return false;
        }
        return true;
    };
    for (uint32_t a = 1; a <= full; ++a) {
        if (!isolable(a)) continue;
        const uint32_t rem = full & ~a;
        // canonical pair: the lowest assigned node sits in A
        for (uint32_t b = rem; b; b = (b - 1) & rem) {
            if (std::countr_zero(b) < std::countr_zero(a)) continue;
            if (isolable(b)) return witness_from_source_sets(ff, surv, f, a, b);
        }
    }
    return std::nullopt;
}

constexpr uint64_t kAutoEnumerationCap = 100'000;

std::optional<ReducedGraph> rootless_for(const DirectedGraph& g, const FaultConfig& fc,
                                         SufficiencyMethod method) {
    const auto ff = fc.fault_free(g);
    const auto surv = surviving_in(g, fc, ff);
    if (method == SufficiencyMethod::Auto)
        method = reduced_graph_count(g, fc) <= kAutoEnumerationCap ? SufficiencyMethod::Enumerate
                                                                   : SufficiencyMethod::SourceSets;
    if (method == SufficiencyMethod::Enumerate) {
        const auto choices = kept_choices(surv, fc.f);
        return scan_reduced_graphs(ff, choices,
                                   [](const ReducedGraph& h) { return !root_exists(h).has_value(); });
    }
    return rootless_by_source_sets(ff, surv, fc.f);
}

std::vector<std::vector<int>> fault_set_candidates(int n, int f) {
    std::vector<std::vector<int>> out;
    std::vector<int> all(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i + 1;
    for (int k = 0; k <= std::min(f, n); ++k)
        for (auto& s : subsets_of_size(all, k)) out.push_back(std::move(s));
    return out;
}

} // namespace

SufficiencyReport check_sufficiency_for(const DirectedGraph& g, const FaultConfig& fc,
                                        SufficiencyMethod method) {
    fc.validate(g);
    SufficiencyReport report;
    auto bad = rootless_for(g, fc, method);
    if (bad) {
        report.ok = false;
        report.witness = SufficiencyWitness{fc.faulty, std::move(*bad)};
    } else {
        report.ok = true;
    }
    return report;
}

SufficiencyReport check_sufficiency_condition(const DirectedGraph& g, int f, SufficiencyMethod method,
                                              Exec exec) {
    if (f < 0) throw ConfigError("sufficiency: f must be non-negative");
    const auto candidates = fault_set_candidates(g.n(), f);
    const int count = static_cast<int>(candidates.size());

    int first_bad = count;
    std::optional<SufficiencyWitness> witness;

    if (exec == Exec::Parallel) {
#pragma omp parallel
        {
            int local_bad = count;
            std::optional<SufficiencyWitness> local_witness;
#pragma omp for schedule(dynamic)
            for (int c = 0; c < count; ++c) {
                if (c >= local_bad) continue;
                FaultConfig fc(f, candidates[static_cast<size_t>(c)]);
                auto bad = rootless_for(g, fc, method);
                if (bad && c < local_bad) {
                    local_bad = c;
                    local_witness = SufficiencyWitness{fc.faulty, std::move(*bad)};
                }
            }
#pragma omp critical(iabc_sufficiency_reduce)
            {
                if (local_bad < first_bad) {
                    first_bad = local_bad;
                    witness = std::move(local_witness);
                }
            }
        }
    } else {
        for (int c = 0; c < count; ++c) {
            FaultConfig fc(f, candidates[static_cast<size_t>(c)]);
            auto bad = rootless_for(g, fc, method);
            if (bad) {
                first_bad = c;
                witness = SufficiencyWitness{fc.faulty, std::move(*bad)};
                break;
            }
        }
    }

    SufficiencyReport report;
    report.ok = first_bad == count;
    if (!report.ok) report.witness = std::move(witness);
    return report;
}

} // namespace iabc
