#include "iabc/adversary.hpp"

#include <algorithm>
#include <cstdint>

namespace iabc {
namespace {

// splitmix64; per-edge sub-seeds are derived by chaining it over
// (seed, t, sender, receiver) so every message has its own stream.
uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t edge_seed(uint64_t seed, int t, int sender, int receiver) {
    uint64_t x = mix(seed ^ 0x6162636465666768ull);
    x = mix(x ^ static_cast<uint64_t>(t));
    x = mix(x ^ (static_cast<uint64_t>(sender) << 32 | static_cast<uint64_t>(receiver)));
    return x;
}

double u01(uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

double param_or(const AdversarySpec& spec, const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

double required_param(const AdversarySpec& spec, const std::string& key) {
    auto it = spec.params.find(key);
    if (it == spec.params.end())
        throw ConfigError("adversary '" + spec.name + "' requires parameter '" + key + "'");
    return it->second;
}

// Edges from faulty senders to fault-free receivers, canonical order.
std::vector<std::pair<int, int>> faulty_edges(const AdversaryView& view) {
    std::vector<std::pair<int, int>> edges;
    for (int s : view.faults->faulty)
        for (int r : view.graph->out_neighbors(s))
            if (!view.faults->is_faulty(r)) edges.emplace_back(s, r);
    return edges;
}

// Fault-free in-neighbor states of `receiver`, ascending by value.
std::vector<double> honest_inputs(const AdversaryView& view, int receiver) {
    std::vector<double> ys;
    for (int j : view.graph->in_neighbors(receiver))
        if (!view.faults->is_faulty(j)) ys.push_back(view.state_of(j));
    std::sort(ys.begin(), ys.end());
    return ys;
}

} // namespace

double AdversaryView::state_of(int id) const {
    auto it = std::lower_bound(ff_ids.begin(), ff_ids.end(), id);
    if (it == ff_ids.end() || *it != id)
        throw ConfigError("adversary view: node " + std::to_string(id) + " is not fault-free");
    return states[static_cast<size_t>(it - ff_ids.begin())];
}

const std::vector<std::string>& builtin_strategies() {
    static const std::vector<std::string> names = {"silent", "constant", "boundary_push",
                                                   "split_random", "mimic_extreme"};
    return names;
}

FaultyEmission emit(const AdversarySpec& spec, const AdversaryView& view) {
    FaultyEmission em;
    const uint64_t seed = spec.seed.value_or(view.seed);

    if (spec.name == "silent") {
        return em; // withhold everything; the engine substitutes the default
    }
    if (spec.name == "constant") {
        const double c = required_param(spec, "value");
        for (const auto& e : faulty_edges(view)) em.messages[e] = c;
        return em;
    }
    if (spec.name == "boundary_push") {
        const double delta = param_or(spec, "delta", 1.0);
        const double mid = 0.5 * (view.u_prev + view.mu_prev);
        for (const auto& e : faulty_edges(view)) {
            const double rs = view.state_of(e.second);
            em.messages[e] = rs >= mid ? view.u_prev + delta : view.mu_prev - delta;
        }
        return em;
    }
    if (spec.name == "split_random") {
        const double lo = view.mu_prev - 1.0, hi = view.u_prev + 1.0;
        for (const auto& e : faulty_edges(view)) {
            const double u = u01(edge_seed(seed, view.t, e.first, e.second));
            em.messages[e] = lo + u * (hi - lo);
        }
        return em;
    }
    if (spec.name == "mimic_extreme") {
        // Send a value strictly inside the receiver's trim window so it
        // survives the elimination of the f smallest and f largest values.
        for (const auto& e : faulty_edges(view)) {
            const auto ys = honest_inputs(view, e.second);
            const int g = static_cast<int>(ys.size());
            double v;
            if (view.f < 1 || g < view.f + 1) {
                v = view.mu_prev;
            } else {
                const double lo = ys[static_cast<size_t>(view.f - 1)];
                const double hi = ys[static_cast<size_t>(g - view.f)];
                v = lo + 0.5 * (hi - lo);
            }
            em.messages[e] = v;
        }
        return em;
    }
    throw ConfigError("unknown adversary strategy '" + spec.name + "'");
}

} // namespace iabc
