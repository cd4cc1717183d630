#pragma once

#include "mflq/problem.hpp"

#include <string>
#include <vector>

namespace mflq {

/// Solutions of the coupled backward recursions, indexed (k, ℓ) with
/// 0 ≤ k ≤ N−1 and k ≤ ℓ ≤ N. Column ℓ = N holds the terminal values.
struct RecursionTables {
    Family<Matrix> P, Pcal;  // symmetric
    Family<Matrix> T, Tcal;  // generally nonsymmetric
    Family<Vector> pi;

    Matrix Pbar(int k, int l) const { return Pcal(k, l) - P(k, l); }
    Matrix Tbar(int k, int l) const { return Tcal(k, l) - T(k, l); }
};

/// Per-step gains. The equilibrium control is u_k = Psi[k] X_k + alpha[k].
struct GainSchedule {
    std::vector<Matrix> W, Wdag;  // m×m
    std::vector<Matrix> H;        // m×n
    std::vector<Vector> beta;     // m
    std::vector<Matrix> Psi;      // −W†H
    std::vector<Vector> alpha;    // −W†β

    int horizon() const { return static_cast<int>(W.size()); }
};

struct SolvabilityReport {
    std::vector<double> convexity_margins;     ///< min eigenvalue of M_{k,2}
    std::vector<double> convexity_tolerances;  ///< 1e-9·(1+‖M_{k,2}‖) per k
    std::vector<double> rangeH_residuals;
    std::vector<double> rangeBeta_residuals;
    double range_tolerance = 1e-8;
    bool verdict_all_pairs = false;
    std::string per_pair_note;
};

struct ConvexityResult {
    std::vector<Matrix> M2;  ///< ℛ_kk + ℬ_kkᵀ𝒫_{k,k+1}ℬ_kk + 𝒟_kkᵀP_{k,k+1}𝒟_kk
    std::vector<PsdVerdict> verdicts;
};

struct SolveOptions {
    /// Added to ℛ_kk when W_k is assembled. Zero reproduces the plain solver.
    double control_regularization = 0.0;
    double range_tolerance = 1e-8;
};

struct Solution {
    RecursionTables tables;
    GainSchedule gains;
    SolvabilityReport report;
    ConvexityResult convexity;
};

/// Fills P and 𝒫 (and the terminal column of every table). T, 𝒯 and π are
/// allocated with their terminal values only.
RecursionTables solve_symmetric(const ProblemData& p);

ConvexityResult convexity_margins(const ProblemData& p, const RecursionTables& tables);

/// Completes T, 𝒯, π over all starting indices k = N−1 … 0 and assembles the
/// gains. Gains W_ℓ, H_ℓ, β_ℓ are frozen when start index ℓ is processed and
/// reused for every smaller k.
Solution solve_gdre_global(const ProblemData& p, RecursionTables tables,
                           const SolveOptions& options = {});

/// Convenience: solve_symmetric followed by solve_gdre_global.
Solution solve(const ProblemData& p, const SolveOptions& options = {});

/// Regularized solve with ℛ_kk + εI in W. Throws Error{EpsilonNonPositive}
/// unless epsilon > 0.
Solution solve_epsilon(const ProblemData& p, double epsilon);

/// Frobenius distance between two gain schedules: max over k of
/// ‖ΔPsi_k‖ + ‖Δalpha_k‖.
double gain_distance(const GainSchedule& a, const GainSchedule& b);

/// Largest gain norm ‖Psi_k‖ + ‖alpha_k‖ over k.
double gain_norm(const GainSchedule& g);

/// Tables produced by the recursions written for an arbitrary affine
/// feedback u_ℓ = Psi_ℓ X_ℓ + alpha_ℓ. Entry i corresponds to ℓ = k + i,
/// the last one to ℓ = N.
struct FeedbackTables {
    int k = 0;
    std::vector<Matrix> T, Tbar, Tcal;
    std::vector<Vector> pi;
};

/// Integrates T and T̄ separately with +Psi. Needs P, 𝒫 from solve_symmetric.
/// Throws Error{DimensionMismatch} on badly shaped feedback.
FeedbackTables feedback_tables(const ProblemData& p, const RecursionTables& symmetric,
                              const std::vector<Matrix>& psi,
                              const std::vector<Vector>& alpha, int k);

/// Dedicated path for data without mean-field terms. Pcal and Tcal equal P
/// and T in the result.
Solution solve_no_meanfield(const PlainData& s, const SolveOptions& options = {});

/// Single-index tables for data that do not depend on the initial time.
struct StageTables {
    std::vector<Matrix> P, Pcal, T, Tcal;  // index ℓ = 0 … N
    std::vector<Vector> pi;
    GainSchedule gains;
};

StageTables solve_time_invariant(const StageData& s);

}  // namespace mflq
