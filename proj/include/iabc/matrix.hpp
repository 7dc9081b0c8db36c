#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iabc/engine.hpp"
#include "iabc/exec.hpp"
#include "iabc/reduced.hpp"

namespace iabc {

/// Stochastic row over the fault-free nodes (entries by fault-free index).
using StochasticRow = std::vector<double>;

/// Dense square matrix, row-major.
struct Matrix {
    int dim = 0;
    std::vector<double> data;

    Matrix() = default;
    explicit Matrix(int d) : dim(d), data(static_cast<size_t>(d) * d, 0.0) {}
    double at(int i, int j) const { return data[static_cast<size_t>(i) * dim + j]; }
    double& at(int i, int j) { return data[static_cast<size_t>(i) * dim + j]; }
    static Matrix identity(int d);
};

/// Affine weights expressing one kept value as a combination of a larger and
/// a smaller trimmed fault-free value: lambda*v_l + psi*v_s = w_k, lambda+psi = 1.
struct WeightDecomposition {
    int k = 0;      // kept sender the weights account for
    int l = 0, s = 0; // the L*/S* pair (l_j, s_j)
    double lambda = 0, psi = 0;
};

struct RowAudit {
    int node = 0;
    bool trimmed_case = false; // false: f-delta+delta_C = 0, true: > 0
    int delta = 0;             // faulty incoming neighbors
    int delta_C = 0;           // faulty nodes that survived trimming
    std::vector<int> l_star, s_star;
    std::vector<WeightDecomposition> decompositions;
    double reproduction_error = 0; // |row . v[t-1] - v_i[t]|
};

struct RowConditions {
    bool stochastic = false;   // non-negative, sums to 1 within 1e-12
    bool diagonal = false;     // M_ii == a_i
    bool zero_pattern = false; // non-zero only at (j,i) in E or j = i
    bool nontrivial = false;   // >= |N_i^- ∩ (V-F)| - f + 1 entries >= beta
    int nontrivial_count = 0;
    bool all() const { return stochastic && diagonal && zero_pattern && nontrivial; }
};

struct TransitionMatrix {
    int t = 0;
    std::vector<int> ff_ids;
    Matrix m;
    std::vector<RowAudit> audits;
    std::vector<RowConditions> conditions;
    bool verified = false;

    int index_of(int id) const;
};

struct ErgodicityReport {
    double delta = 0;        // max column spread
    double lambda_coeff = 0; // 1 - min pairwise shared mass
    bool scrambling = false; // lambda < 1
};

/// Uniform lower bound on non-trivial row entries, valid for all nodes and
/// rounds: alpha when f = 0, else alpha/(4f).
double beta(const DirectedGraph& g, int f);

/// Reconstructs row i of the round-t transition matrix from the trace,
/// following the constructive case split on f - delta + delta_C. The audit
/// records the chosen L*/S* and every weight decomposition.
StochasticRow build_transition_row(const RoundTrace& trace, int i, const FaultConfig& fc,
                                   RowAudit* audit = nullptr);

/// Stacks build_transition_row over all fault-free nodes and verifies the
/// four row conditions plus exact state reproduction (throws
/// VerificationError on any failure). `beta_bound` comes from beta(g, f).
TransitionMatrix build_transition_matrix(const RoundTrace& trace, const FaultConfig& fc,
                                         double beta_bound, Exec exec = Exec::Serial);

/// Both ergodicity coefficients by direct pairwise evaluation; rejects
/// matrices whose rows are not stochastic within 1e-9.
ErgodicityReport ergodicity(const Matrix& m, Exec exec = Exec::Serial);

struct HajnalCheck {
    bool ok = false;
    double delta_of_product = 0;
    double lambda_product = 0;
};

/// delta(Q1 Q2 ... Qp) <= prod lambda(Qi), up to 1e-10 slack. Product is
/// applied in evolution order (later matrices multiply from the left).
HajnalCheck hajnal_bound_check(const std::vector<Matrix>& matrices, Exec exec = Exec::Serial);

/// Witness H[t] in R_F with beta * H[t] <= M[t] entrywise. Throws
/// VerificationError when no witness exists (condition 4 violated).
ReducedGraph dominance_check(const TransitionMatrix& m, const FaultConfig& fc,
                             const DirectedGraph& g, int f);

struct BlockCheck {
    int block = 0;          // 1-based
    double lambda = 0;
    double delta = 0;
    bool stochastic = false;
    bool scrambling = false;
    bool bound_ok = false;   // lambda <= 1 - beta^(tau(n-phi)) + 1e-10
    int column = -1;         // node id of an all-positive column, -1 if none
    double column_min = 0;
    bool column_ok = false;  // that column's entries >= beta^(tau(n-phi))
};

struct BlockCertificate {
    uint64_t tau = 0;
    int block_len = 0; // tau * (n - phi)
    double beta_bound = 0;
    double beta_pow = 0; // beta^block_len
    std::vector<BlockCheck> blocks;
    bool ok = false;
};

/// Splits the matrix list into consecutive blocks of tau*(n-phi) rounds,
/// forms each block product Q(i), and checks: row stochastic, scrambling,
/// lambda(Q(i)) <= 1 - beta^(tau(n-phi)), and an all-positive column bounded
/// below by beta^(tau(n-phi)). The list length must be a multiple of the
/// block length.
BlockCertificate block_product_certificate(const std::vector<TransitionMatrix>& matrices,
                                           const DirectedGraph& g, const FaultConfig& fc,
                                           Exec exec = Exec::Serial);

struct ConvergenceReport {
    bool validity_ok = false;
    bool matrices_ok = false;
    int rounds_verified = 0;
    int n_minus_phi = 0;
    uint64_t tau = 0;
    int block_len = 0;       // 0 when tau*(n-phi) overflows or exceeds the run
    int completed_blocks = 0;
    std::optional<BlockCertificate> blocks;
    bool spread_bound_ok = false; // spread(kB)/spread(0) <= prod lambda(Q(i)) + 1e-10
    double spread_ratio = 0;
    double lambda_product = 1;
    bool converged = false;
    double final_spread = 0;
    double consensus_value = 0;  // midpoint of the final hull
    bool within_epsilon = false; // every final state within epsilon of consensus_value
    std::string first_failure;   // diagnostic for the first failed sub-check
    bool ok = false;
};

/// End-to-end certificate for a finished run: validity, per-round matrix
/// verification, block certificates over completed blocks, and the numeric
/// contraction bound on the spread.
ConvergenceReport convergence_certificate(const std::vector<RoundTrace>& traces,
                                          const DirectedGraph& g, const FaultConfig& fc,
                                          double epsilon, Exec exec = Exec::Serial);

// Matrix helpers shared by the certificate path and the tests/benchmarks.
Matrix matmul(const Matrix& a, const Matrix& b, Exec exec = Exec::Serial);
bool is_row_stochastic(const Matrix& m, double tol = 1e-9);

} // namespace iabc
