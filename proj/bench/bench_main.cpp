// Times the OpenMP kernels against their serial reference on inputs large
// enough to matter, and verifies that both paths agree bit for bit.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "iabc/engine.hpp"
#include "iabc/exec.hpp"
#include "iabc/matrix.hpp"

using namespace iabc;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void row(const char* kernel, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-28s %10.1f ms %10.1f ms %8.2fx   %s\n", kernel, serial_ms, parallel_ms,
                serial_ms / parallel_ms, match ? "match" : "MISMATCH");
}

Matrix random_stochastic(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) {
        double sum = 0.0;
        for (int j = 0; j < dim; ++j) {
            m.at(i, j) = u(rng);
            sum += m.at(i, j);
        }
        for (int j = 0; j < dim; ++j) m.at(i, j) /= sum;
    }
    return m;
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", max_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    std::mt19937_64 rng(42);

    { // synchronous round updates across nodes
        const int n = 400, f = 60, rounds = 30;
        const auto g = DirectedGraph::complete(n);
        std::vector<int> faulty;
        for (int i = n - f + 1; i <= n; ++i) faulty.push_back(i);
        const FaultConfig fc(f, faulty);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> init(static_cast<size_t>(n - f));
        for (auto& v : init) v = u(rng);
        const AdversarySpec adv{"constant", {{"value", 1e6}}, {}};

        auto drive = [&](Exec exec) {
            std::vector<double> states = init;
            for (int t = 1; t <= rounds; ++t)
                states = run_round(g, fc, states, adv, t, 0.0, 1, exec).states_after;
            return states;
        };
        drive(Exec::Serial); // warm up
        auto t0 = Clock::now();
        const auto serial = drive(Exec::Serial);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const auto parallel = drive(Exec::Parallel);
        const double parallel_ms = ms_since(t0);
        row("round updates (n=400)", serial_ms, parallel_ms, serial == parallel);
    }

    { // ergodicity coefficients
        const auto m = random_stochastic(rng, 700);
        ergodicity(m, Exec::Serial);
        auto t0 = Clock::now();
        const auto s = ergodicity(m, Exec::Serial);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const auto p = ergodicity(m, Exec::Parallel);
        const double parallel_ms = ms_since(t0);
        row("ergodicity (dim=700)", serial_ms, parallel_ms,
            s.delta == p.delta && s.lambda_coeff == p.lambda_coeff);
    }

    { // transition matrix reconstruction across rows
        const int n = 260, f = 40;
        const auto g = DirectedGraph::complete(n);
        std::vector<int> faulty;
        for (int i = n - f + 1; i <= n; ++i) faulty.push_back(i);
        const FaultConfig fc(f, faulty);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> states(static_cast<size_t>(n - f));
        for (auto& v : states) v = u(rng);
        // mimic_extreme keeps faulty values inside the trim window, which
        // forces the decomposition-heavy reconstruction path
        const auto trace = run_round(g, fc, states, {"mimic_extreme", {}, {}}, 1, 0.0, 2);
        const double b = beta(g, f);

        build_transition_matrix(trace, fc, b, Exec::Serial);
        auto t0 = Clock::now();
        const auto s = build_transition_matrix(trace, fc, b, Exec::Serial);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const auto p = build_transition_matrix(trace, fc, b, Exec::Parallel);
        const double parallel_ms = ms_since(t0);
        row("matrix rebuild (n=260)", serial_ms, parallel_ms, s.m.data == p.m.data);
    }

    { // chained stochastic products
        const int dim = 500, chain = 6;
        std::vector<Matrix> ms;
        for (int k = 0; k < chain; ++k) ms.push_back(random_stochastic(rng, dim));
        auto drive = [&](Exec exec) {
            Matrix acc = Matrix::identity(dim);
            for (const auto& m : ms) acc = matmul(m, acc, exec);
            return acc;
        };
        drive(Exec::Serial);
        auto t0 = Clock::now();
        const auto s = drive(Exec::Serial);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        const auto p = drive(Exec::Parallel);
        const double parallel_ms = ms_since(t0);
        row("matrix products (dim=500)", serial_ms, parallel_ms, s.data == p.data);
    }

    return 0;
}
