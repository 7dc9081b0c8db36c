#include "iabc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace iabc {
namespace {

// Neumaier-compensated sum/dot, used for row sums, reproduction checks, and
// matrix products.
double compensated_sum(const double* v, size_t n) {
    double s = 0.0, c = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double x = v[k];
        const double t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

double compensated_dot(const double* a, const double* b, size_t n) {
    double s = 0.0, c = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double x = a[k] * b[k];
        const double t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

} // namespace

Matrix Matrix::identity(int d) {
    Matrix m(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
}

int TransitionMatrix::index_of(int id) const {
    auto it = std::lower_bound(ff_ids.begin(), ff_ids.end(), id);
    if (it == ff_ids.end() || *it != id) return -1;
    return static_cast<int>(it - ff_ids.begin());
}

double beta(const DirectedGraph& g, int f) {
    const double a = alpha(g, f);
    return f == 0 ? a : a / (4.0 * f);
}

StochasticRow build_transition_row(const RoundTrace& trace, int i, const FaultConfig& fc,
                                   RowAudit* audit) {
    const int p = trace.index_of(i);
    if (p < 0) throw ConfigError("build_transition_row: node " + std::to_string(i) + " is not fault-free");
    const int q = static_cast<int>(trace.ff_ids.size());
    const RoundInbox& inbox = trace.inboxes[static_cast<size_t>(p)];
    const TrimOutcome& trimmed = trace.trims[static_cast<size_t>(p)];
    const int f = fc.f;
    const double a_i = 1.0 / static_cast<double>(trimmed.kept.size() + 1);

    int delta = 0;
    for (const auto& [sender, value] : inbox.entries)
        if (fc.is_faulty(sender)) ++delta;
    int delta_C = 0;
    for (int k : trimmed.kept)
        if (fc.is_faulty(k)) ++delta_C;
    const int m = f - delta + delta_C;

    RowAudit local;
    RowAudit& aud = audit ? *audit : local;
    aud.node = i;
    aud.delta = delta;
    aud.delta_C = delta_C;
    aud.trimmed_case = m > 0;

    StochasticRow row(static_cast<size_t>(q), 0.0);
    row[static_cast<size_t>(p)] = a_i;

    if (m == 0) {
        // every kept node is fault-free; the update already is a convex
        // combination of fault-free states
        for (int k : trimmed.kept) row[static_cast<size_t>(trace.index_of(k))] = a_i;
    } else {
        // pick the smallest-id fault-free members of L and S
        auto pick_star = [&](const std::vector<int>& removed, const char* side) {
            std::vector<int> ids;
            for (int id : removed)
                if (!fc.is_faulty(id)) ids.push_back(id);
            std::sort(ids.begin(), ids.end());
            if (static_cast<int>(ids.size()) < m)
                throw VerificationError("node " + std::to_string(i) + ": only " +
                                        std::to_string(ids.size()) + " fault-free nodes in " + side +
                                        ", need " + std::to_string(m) +
                                        " (inconsistent with |F| <= f)");
            ids.resize(static_cast<size_t>(m));
            return ids;
        };
        aud.l_star = pick_star(trimmed.removed_large, "L");
        aud.s_star = pick_star(trimmed.removed_small, "S");

        std::vector<double> v_l(static_cast<size_t>(m)), v_s(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j) {
            v_l[static_cast<size_t>(j)] =
                trace.states_before[static_cast<size_t>(trace.index_of(aud.l_star[static_cast<size_t>(j)]))];
            v_s[static_cast<size_t>(j)] =
                trace.states_before[static_cast<size_t>(trace.index_of(aud.s_star[static_cast<size_t>(j)]))];
        }

        const double sandwich_tol = 1e-9 * std::max(1.0, inf_norm(trace.states_before));
        for (const auto& [k, w_k] : trimmed.kept_values) {
            const bool k_faulty = fc.is_faulty(k);
            const double coeff = k_faulty ? a_i / m : a_i / (2.0 * m);
            if (!k_faulty) row[static_cast<size_t>(trace.index_of(k))] += a_i / 2.0;
            for (int j = 0; j < m; ++j) {
                const double vl = v_l[static_cast<size_t>(j)], vs = v_s[static_cast<size_t>(j)];
                if (w_k < vs - sandwich_tol || w_k > vl + sandwich_tol)
                    throw VerificationError("node " + std::to_string(i) + ": kept value " +
                                            std::to_string(w_k) + " from " + std::to_string(k) +
                                            " escapes [" + std::to_string(vs) + ", " +
                                            std::to_string(vl) + "]");
                double lambda;
                if (vl == vs)
                    lambda = 0.5; // degenerate sandwich, w_k equals both endpoints
                else
                    lambda = std::clamp((w_k - vs) / (vl - vs), 0.0, 1.0);
                const double psi = 1.0 - lambda;
                row[static_cast<size_t>(trace.index_of(aud.l_star[static_cast<size_t>(j)]))] += coeff * lambda;
                row[static_cast<size_t>(trace.index_of(aud.s_star[static_cast<size_t>(j)]))] += coeff * psi;
                aud.decompositions.push_back({k, aud.l_star[static_cast<size_t>(j)],
                                              aud.s_star[static_cast<size_t>(j)], lambda, psi});
            }
        }
    }

    aud.reproduction_error = std::fabs(
        compensated_dot(row.data(), trace.states_before.data(), row.size()) -
        trace.states_after[static_cast<size_t>(p)]);
    return row;
}

namespace {

RowConditions verify_row(const RoundTrace& trace, const FaultConfig& fc, int p,
                         const StochasticRow& row, const RowAudit& aud, double beta_bound) {
    RowConditions cond;
    const int i = trace.ff_ids[static_cast<size_t>(p)];
    const RoundInbox& inbox = trace.inboxes[static_cast<size_t>(p)];
    const double a_i = 1.0 / static_cast<double>(trace.trims[static_cast<size_t>(p)].kept.size() + 1);

    bool nonneg = true;
    for (double x : row) nonneg = nonneg && x >= 0.0;
    cond.stochastic = nonneg && std::fabs(compensated_sum(row.data(), row.size()) - 1.0) <= 1e-12;

    cond.diagonal = row[static_cast<size_t>(p)] == a_i;

    std::vector<char> allowed(row.size(), 0);
    allowed[static_cast<size_t>(p)] = 1;
    int surviving = 0;
    for (const auto& [sender, value] : inbox.entries)
        if (!fc.is_faulty(sender)) {
            allowed[static_cast<size_t>(trace.index_of(sender))] = 1;
            ++surviving;
        }
    cond.zero_pattern = true;
    for (size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0.0 && !allowed[j]) cond.zero_pattern = false;

    const double thr = beta_bound * (1.0 - 1e-12);
    for (double x : row)
        if (x >= thr) ++cond.nontrivial_count;
    cond.nontrivial = cond.nontrivial_count >= surviving - fc.f + 1;

    const double tol = 1e-9 * std::max(1.0, inf_norm(trace.states_before));
    if (aud.reproduction_error > tol) {
        std::ostringstream os;
        os << "node " << i << " round " << trace.t << ": row reproduces the update with error "
           << aud.reproduction_error;
        throw VerificationError(os.str());
    }
    return cond;
}

} // namespace

TransitionMatrix build_transition_matrix(const RoundTrace& trace, const FaultConfig& fc,
                                         double beta_bound, Exec exec) {
    const int q = static_cast<int>(trace.ff_ids.size());
    TransitionMatrix tm;
    tm.t = trace.t;
    tm.ff_ids = trace.ff_ids;
    tm.m = Matrix(q);
    tm.audits.resize(static_cast<size_t>(q));
    tm.conditions.resize(static_cast<size_t>(q));

    std::vector<std::string> errors(static_cast<size_t>(q));
    auto one_row = [&](int p) {
        try {
            RowAudit& aud = tm.audits[static_cast<size_t>(p)];
            StochasticRow row =
                build_transition_row(trace, trace.ff_ids[static_cast<size_t>(p)], fc, &aud);
            tm.conditions[static_cast<size_t>(p)] = verify_row(trace, fc, p, row, aud, beta_bound);
            std::copy(row.begin(), row.end(), tm.m.data.begin() + static_cast<size_t>(p) * q);
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(p)] = e.what();
        }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int p = 0; p < q; ++p) one_row(p);
    } else {
        for (int p = 0; p < q; ++p) one_row(p);
    }

    for (const auto& err : errors)
        if (!err.empty()) throw VerificationError(err);
    for (int p = 0; p < q; ++p) {
        const RowConditions& c = tm.conditions[static_cast<size_t>(p)];
        if (!c.all()) {
            std::ostringstream os;
            os << "round " << trace.t << " node " << trace.ff_ids[static_cast<size_t>(p)]
               << ": row conditions failed (stochastic=" << c.stochastic << " diagonal=" << c.diagonal
               << " zero_pattern=" << c.zero_pattern << " nontrivial=" << c.nontrivial
               << " count=" << c.nontrivial_count << ")";
            throw VerificationError(os.str());
        }
    }
    tm.verified = true;
    return tm;
}

bool is_row_stochastic(const Matrix& m, double tol) {
    for (int i = 0; i < m.dim; ++i) {
        double sum = compensated_sum(m.data.data() + static_cast<size_t>(i) * m.dim,
                                     static_cast<size_t>(m.dim));
        if (std::fabs(sum - 1.0) > tol) return false;
        for (int j = 0; j < m.dim; ++j)
            if (m.at(i, j) < -1e-12) return false;
    }
    return true;
}

ErgodicityReport ergodicity(const Matrix& m, Exec exec) {
    if (m.dim < 1 || m.data.size() != static_cast<size_t>(m.dim) * m.dim)
        throw ConfigError("ergodicity: matrix is not square");
    if (!is_row_stochastic(m, 1e-9)) throw VerificationError("ergodicity: matrix is not row stochastic");

    ErgodicityReport report;
    if (m.dim == 1) {
        report.delta = 0.0;
        report.lambda_coeff = 0.0;
        report.scrambling = true;
        return report;
    }

    const int d = m.dim;
    double delta = 0.0;
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(max : delta)
        for (int j = 0; j < d; ++j) {
            double lo = m.at(0, j), hi = m.at(0, j);
            for (int i = 1; i < d; ++i) {
                lo = std::min(lo, m.at(i, j));
                hi = std::max(hi, m.at(i, j));
            }
            delta = std::max(delta, hi - lo);
        }
    } else {
        for (int j = 0; j < d; ++j) {
            double lo = m.at(0, j), hi = m.at(0, j);
            for (int i = 1; i < d; ++i) {
                lo = std::min(lo, m.at(i, j));
                hi = std::max(hi, m.at(i, j));
            }
            delta = std::max(delta, hi - lo);
        }
    }

    const int pairs = d * (d - 1) / 2;
    double min_shared = 2.0;
    auto pair_shared = [&](int idx) {
        // unrank idx -> (i1, i2), i1 < i2
        int i1 = 0, rem = idx;
        while (rem >= d - 1 - i1) {
            rem -= d - 1 - i1;
            ++i1;
        }
        const int i2 = i1 + 1 + rem;
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += std::min(m.at(i1, j), m.at(i2, j));
        return s;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(min : min_shared)
        for (int idx = 0; idx < pairs; ++idx) min_shared = std::min(min_shared, pair_shared(idx));
    } else {
        for (int idx = 0; idx < pairs; ++idx) min_shared = std::min(min_shared, pair_shared(idx));
    }

    report.delta = std::clamp(delta, 0.0, 1.0);
    report.lambda_coeff = std::clamp(1.0 - min_shared, 0.0, 1.0);
    report.scrambling = report.lambda_coeff < 1.0;
    return report;
}

Matrix matmul(const Matrix& a, const Matrix& b, Exec exec) {
    if (a.dim != b.dim) throw ConfigError("matmul: dimension mismatch");
    const int d = a.dim;
    Matrix out(d);
    auto one_row = [&](int i, std::vector<double>& terms) {
        for (int j = 0; j < d; ++j) {
            for (int k = 0; k < d; ++k) terms[static_cast<size_t>(k)] = a.at(i, k) * b.at(k, j);
            out.at(i, j) = compensated_sum(terms.data(), terms.size());
        }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel
        {
            std::vector<double> terms(static_cast<size_t>(d));
#pragma omp for schedule(static)
            for (int i = 0; i < d; ++i) one_row(i, terms);
        }
    } else {
        std::vector<double> terms(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) one_row(i, terms);
    }
    return out;
}

HajnalCheck hajnal_bound_check(const std::vector<Matrix>& matrices, Exec exec) {
    if (matrices.empty()) throw ConfigError("hajnal_bound_check: empty list");
    HajnalCheck check;
    Matrix product = Matrix::identity(matrices.front().dim);
    check.lambda_product = 1.0;
    for (const auto& m : matrices) {
        check.lambda_product *= ergodicity(m, exec).lambda_coeff;
        product = matmul(m, product, exec); // later rounds act from the left
    }
    check.delta_of_product = ergodicity(product, exec).delta;
    check.ok = check.delta_of_product <= check.lambda_product + 1e-10;
    return check;
}

ReducedGraph dominance_check(const TransitionMatrix& tm, const FaultConfig& fc,
                             const DirectedGraph& g, int f) {
    if (!tm.verified) throw ConfigError("dominance_check: matrix must be verified first");
    const double b = beta(g, f);
    const double thr = b * (1.0 - 1e-12);
    const int q = static_cast<int>(tm.ff_ids.size());

    ReducedGraph h;
    h.nodes = tm.ff_ids;
    h.kept_in.resize(static_cast<size_t>(q));
    for (int p = 0; p < q; ++p) {
        const int i = tm.ff_ids[static_cast<size_t>(p)];
        if (tm.m.at(p, p) < thr)
            throw VerificationError("dominance: diagonal of node " + std::to_string(i) +
                                    " falls below beta");
        std::vector<int> candidates;
        int surviving = 0;
        for (int j : g.in_neighbors(i)) {
            if (fc.is_faulty(j)) continue;
            ++surviving;
            if (tm.m.at(p, tm.index_of(j)) >= thr) candidates.push_back(j);
        }
        const int need = std::max(0, surviving - f);
        if (static_cast<int>(candidates.size()) < need)
            throw VerificationError("dominance: node " + std::to_string(i) + " has only " +
                                    std::to_string(candidates.size()) +
                                    " non-trivial in-edges, needs " + std::to_string(need));
        candidates.resize(static_cast<size_t>(need));
        h.kept_in[static_cast<size_t>(p)] = std::move(candidates);
    }
    return h;
}

BlockCertificate block_product_certificate(const std::vector<TransitionMatrix>& matrices,
                                           const DirectedGraph& g, const FaultConfig& fc,
                                           Exec exec) {
    if (matrices.empty()) throw ConfigError("block certificate: empty matrix list");
    const int q = static_cast<int>(matrices.front().ff_ids.size());

    BlockCertificate cert;
    cert.tau = reduced_graph_count(g, fc);
    const uint64_t block_len = cert.tau * static_cast<uint64_t>(q);
    if (cert.tau == 0 || block_len > matrices.size() || matrices.size() % block_len != 0)
        throw ConfigError("block certificate: " + std::to_string(matrices.size()) +
                          " matrices is not a positive multiple of tau*(n-phi) = " +
                          std::to_string(block_len));
    cert.block_len = static_cast<int>(block_len);
    cert.beta_bound = beta(g, fc.f);
    cert.beta_pow = std::pow(cert.beta_bound, static_cast<double>(cert.block_len));

    const int nblocks = static_cast<int>(matrices.size() / block_len);
    cert.blocks.resize(static_cast<size_t>(nblocks));
    auto one_block = [&](int b) {
        Matrix qmat = Matrix::identity(q);
        for (uint64_t t = static_cast<uint64_t>(b) * block_len; t < (static_cast<uint64_t>(b) + 1) * block_len; ++t)
            qmat = matmul(matrices[static_cast<size_t>(t)].m, qmat);
        BlockCheck& bc = cert.blocks[static_cast<size_t>(b)];
        bc.block = b + 1;
        bc.stochastic = is_row_stochastic(qmat, 1e-9);
        const auto erg = ergodicity(qmat);
        bc.lambda = erg.lambda_coeff;
        bc.delta = erg.delta;
        bc.scrambling = erg.scrambling;
        bc.bound_ok = bc.lambda <= 1.0 - cert.beta_pow + 1e-10;
        const double col_thr = cert.beta_pow * (1.0 - 1e-10);
        for (int j = 0; j < q && bc.column < 0; ++j) {
            double cmin = qmat.at(0, j);
            for (int i = 1; i < q; ++i) cmin = std::min(cmin, qmat.at(i, j));
            if (cmin > 0.0 && cmin >= col_thr) {
                bc.column = matrices.front().ff_ids[static_cast<size_t>(j)];
                bc.column_min = cmin;
            }
        }
        bc.column_ok = bc.column >= 0;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int b = 0; b < nblocks; ++b) one_block(b);
    } else {
        for (int b = 0; b < nblocks; ++b) one_block(b);
    }

    cert.ok = true;
    for (const auto& bc : cert.blocks)
        cert.ok = cert.ok && bc.stochastic && bc.scrambling && bc.bound_ok && bc.column_ok;
    return cert;
}

ConvergenceReport convergence_certificate(const std::vector<RoundTrace>& traces,
                                          const DirectedGraph& g, const FaultConfig& fc,
                                          double epsilon, Exec exec) {
    ConvergenceReport report;
    if (traces.empty()) {
        // a run that needed no rounds: the inputs already agreed
        report.validity_ok = true;
        report.matrices_ok = true;
        report.spread_bound_ok = true;
        report.converged = true;
        report.within_epsilon = true;
        report.ok = true;
        return report;
    }

    report.validity_ok = check_validity(traces);
    if (!report.validity_ok) report.first_failure = "validity: mu/U not monotone";

    const double b = beta(g, fc.f);
    const int rounds = static_cast<int>(traces.size());
    std::vector<TransitionMatrix> matrices(static_cast<size_t>(rounds));
    std::vector<std::string> errors(static_cast<size_t>(rounds));
    auto one_round = [&](int t) {
        try {
            matrices[static_cast<size_t>(t)] = build_transition_matrix(traces[static_cast<size_t>(t)], fc, b);
            dominance_check(matrices[static_cast<size_t>(t)], fc, g, fc.f);
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(t)] = e.what();
        }
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < rounds; ++t) one_round(t);
    } else {
        for (int t = 0; t < rounds; ++t) one_round(t);
    }
    report.matrices_ok = true;
    for (const auto& err : errors)
        if (!err.empty()) {
            report.matrices_ok = false;
            if (report.first_failure.empty()) report.first_failure = err;
            break;
        }
    report.rounds_verified = rounds;

    const int q = static_cast<int>(traces.front().ff_ids.size());
    report.n_minus_phi = q;
    report.tau = reduced_graph_count(g, fc);
    const uint64_t block_len = report.tau * static_cast<uint64_t>(q);
    report.block_len = block_len <= static_cast<uint64_t>(rounds) ? static_cast<int>(block_len) : 0;
    report.completed_blocks = report.block_len > 0 ? rounds / report.block_len : 0;

    report.spread_bound_ok = true;
    report.lambda_product = 1.0;
    if (report.matrices_ok && report.completed_blocks > 0) {
        const size_t covered = static_cast<size_t>(report.completed_blocks) * report.block_len;
        std::vector<TransitionMatrix> prefix(matrices.begin(), matrices.begin() + covered);
        try {
            report.blocks = block_product_certificate(prefix, g, fc, exec);
            for (const auto& bc : report.blocks->blocks) report.lambda_product *= bc.lambda;
            const double spread0 = spread_of(traces.front().states_before);
            const double spread_k = spread_of(traces[covered - 1].states_after);
            report.spread_ratio = spread0 > 0.0 ? spread_k / spread0 : 0.0;
            report.spread_bound_ok = report.spread_ratio <= report.lambda_product + 1e-10;
            if (!report.spread_bound_ok && report.first_failure.empty())
                report.first_failure = "spread ratio exceeds product of block lambdas";
            if (!report.blocks->ok && report.first_failure.empty())
                report.first_failure = "block certificate failed";
        } catch (const std::exception& e) {
            report.spread_bound_ok = false;
            if (report.first_failure.empty()) report.first_failure = e.what();
        }
    }

    const auto& final_states = traces.back().states_after;
    report.final_spread = spread_of(final_states);
    report.converged = report.final_spread < epsilon;
    report.consensus_value = 0.5 * (traces.back().u_after + traces.back().mu_after);
    report.within_epsilon = true;
    for (double v : final_states)
        report.within_epsilon = report.within_epsilon && std::fabs(v - report.consensus_value) <= epsilon;
    if (!report.converged && report.first_failure.empty())
        report.first_failure = "spread did not fall below epsilon";

    report.ok = report.validity_ok && report.matrices_ok && report.spread_bound_ok &&
                (!report.blocks || report.blocks->ok) && report.converged && report.within_epsilon;
    return report;
}

} // namespace iabc
