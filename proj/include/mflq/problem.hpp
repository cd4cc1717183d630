#pragma once

#include "mflq/matrix_ops.hpp"
#include "mflq/triangular.hpp"

#include <string>
#include <vector>

namespace mflq {

template <typename T>
using Family = TriangularFamily<T>;

/// Time-indexed data of a mean-field LQ problem. Every family is indexed by
/// (t, k) with 0 ≤ t ≤ k ≤ N−1: t is the initial time the data belong to and
/// k the running step. Terminal weights are indexed by t alone.
///
/// A block of size 0×0 (or an empty vector) marks missing data; validate()
/// reports it.
struct ProblemData {
    int n = 0;  ///< state dimension
    int m = 0;  ///< control dimension
    int N = 0;  ///< horizon

    Family<Matrix> A, Abar, C, Cbar;  // n×n
    Family<Matrix> B, Bbar, D, Dbar;  // n×m
    Family<Vector> f, d;              // n
    Family<Matrix> Q, Qbar;           // n×n symmetric
    Family<Matrix> R, Rbar;           // m×m symmetric
    Family<Vector> q;                 // n
    Family<Vector> rho;               // m
    std::vector<Matrix> G, Gbar;      // n×n symmetric, per t
    std::vector<Vector> g;            // n, per t

    /// All-zero instance of the given shape.
    static ProblemData zeros(int n, int m, int N);

    // Sums of a datum and its mean-field partner.
    Matrix A_cal(int t, int k) const { return A(t, k) + Abar(t, k); }
    Matrix B_cal(int t, int k) const { return B(t, k) + Bbar(t, k); }
    Matrix C_cal(int t, int k) const { return C(t, k) + Cbar(t, k); }
    Matrix D_cal(int t, int k) const { return D(t, k) + Dbar(t, k); }
    Matrix Q_cal(int t, int k) const { return Q(t, k) + Qbar(t, k); }
    Matrix R_cal(int t, int k) const { return R(t, k) + Rbar(t, k); }
    Matrix G_cal(int t) const { return G[static_cast<std::size_t>(t)] + Gbar[static_cast<std::size_t>(t)]; }

    const Matrix& G_at(int t) const { return G[static_cast<std::size_t>(t)]; }
    const Matrix& Gbar_at(int t) const { return Gbar[static_cast<std::size_t>(t)]; }
    const Vector& g_at(int t) const { return g[static_cast<std::size_t>(t)]; }
};

enum class Severity { Warning, Error };

struct Finding {
    Severity severity = Severity::Error;
    std::string path;     ///< e.g. "Q[0][1]" or "G[1]"
    std::string message;
    double defect = 0.0;  ///< asymmetry size for symmetry findings
};

/// Symmetry defects at or below this size are repaired with a warning.
inline constexpr double kSymmetryAutoFix = 1e-9;

/// Checks shapes, finiteness and weight symmetry. Returns no findings iff
/// every invariant holds. Does not modify the problem.
std::vector<Finding> validate(const ProblemData& p);

/// Replaces every symmetric weight by (M + Mᵀ)/2.
void symmetrize_weights(ProblemData& p);

bool has_errors(const std::vector<Finding>& findings);

/// Per-step data for problems whose coefficients do not depend on the initial
/// time. Every per-step vector has length N.
struct StageData {
    int n = 0, m = 0, N = 0;
    std::vector<Matrix> A, Abar, B, Bbar, C, Cbar, D, Dbar;
    std::vector<Vector> f, d;
    std::vector<Matrix> Q, Qbar, R, Rbar;
    std::vector<Vector> q, rho;
    Matrix G, Gbar;
    Vector g;
};

/// Broadcasts per-step data to every (t, k): A(t, k) = A_k for all t ≤ k.
ProblemData from_time_invariant(const StageData& s);

/// Data without mean-field terms. Families are indexed (t, k) as in
/// ProblemData.
struct PlainData {
    int n = 0, m = 0, N = 0;
    Family<Matrix> A, B, C, D;
    Family<Vector> f, d;
    Family<Matrix> Q, R;
    Family<Vector> q, rho;
    std::vector<Matrix> G;
    std::vector<Vector> g;
};

/// Embeds a problem without mean-field terms; every barred datum is zero.
ProblemData from_no_meanfield(const PlainData& s);

/// The two-dimensional, two-step example instance with initial-time dependent
/// data and indefinite weights.
ProblemData two_step_example();

}  // namespace mflq
