#pragma once

#include "mflq/problem.hpp"
#include "mflq/recursion.hpp"
#include "mflq/scenario_tree.hpp"

#include <cstdint>
#include <vector>

namespace mflq {

/// Initial time and ℱ_t-measurable initial state: one vector per level-t
/// node (a single vector when t = 0).
struct InitialPair {
    int t = 0;
    LevelValues x;

    static InitialPair deterministic(const Vector& x0) { return {0, LevelValues{x0}}; }
};

/// State of the system started at level s from x under the open-loop
/// control u, using the data of initial time s and E_s. Levels s … N.
AdaptedProcess roll_forward(const ProblemData& p, int s, const LevelValues& x, const AdaptedProcess& u);

/// Cost J(s, x; u) at every level-s node, for a state already rolled out.
std::vector<double> cost(const ProblemData& p, int s, const AdaptedProcess& X, const AdaptedProcess& u);

/// Rolls out and evaluates J(s, x; u).
std::vector<double> cost(const ProblemData& p, int s, const LevelValues& x, const AdaptedProcess& u);

/// Equilibrium-state dynamics for a given control: each step uses the data
/// of the current time as initial time, so X_{k+1} agrees with the system
/// restarted at (k, X_k).
AdaptedProcess equilibrium_state(const ProblemData& p, const InitialPair& init, const AdaptedProcess& u);

struct ClosedLoop {
    AdaptedProcess X;  ///< levels t … N
    AdaptedProcess u;  ///< levels t … N−1
};

/// Affine feedback u_k = psi[k] X_k + alpha[k] along the equilibrium-state
/// dynamics.
ClosedLoop closed_loop(const ProblemData& p, const std::vector<Matrix>& psi,
                       const std::vector<Vector>& alpha, const InitialPair& init);
ClosedLoop closed_loop(const ProblemData& p, const GainSchedule& gains, const InitialPair& init);

/// Adjoint of the system restarted at level k; X must cover levels k … N.
AdaptedProcess solve_bsde(const ProblemData& p, int k, const AdaptedProcess& X);

/// First-order coefficient ℛ_kk u_k + ℬ_kkᵀE_kZ_{k+1} + 𝒟_kkᵀE_k(Z_{k+1}w_k) + ρ_kk
/// at every level-k node, and the summed norms of its four terms.
struct Gradient {
    LevelValues value;
    std::vector<double> scale;
};
Gradient stationarity_gradient(const ProblemData& p, int k, const AdaptedProcess& Z, const LevelValues& uk);

/// Per k ∈ {t … N−1}: largest node-wise ‖gradient‖ / (1 + sum of term norms)
/// for the system restarted at (k, X*_k). Entry i is k = t + i.
std::vector<double> stationarity_residual(const ProblemData& p, const InitialPair& init,
                                          const AdaptedProcess& u);

struct JhatValue {
    std::vector<double> value;      ///< per level-k node
    std::vector<double> magnitude;  ///< sum of absolute term values
};

/// Cost of the variational system driven by a single-instant perturbation
/// at level k, from zero initial state.
JhatValue jhat(const ProblemData& p, int k, const LevelValues& ubar);

/// Largest node-wise |ΔJ − 2λ gᵀū − λ²Ĵ| / (1 + |J₁| + |J₀|).
double difference_formula_check(const ProblemData& p, int k, const LevelValues& zeta,
                                const AdaptedProcess& u, const LevelValues& ubar, double lambda);

/// Largest ‖Z_ℓ − (P(X − E_kX) + 𝒫E_kX + T(X* − E_kX*) + 𝒯E_kX* + π)‖ / (1 + ‖Z_ℓ‖)
/// over ℓ ∈ {k … N} and nodes, with the tables of the affine feedback.
double representation_check(const ProblemData& p, const RecursionTables& symmetric,
                            const std::vector<Matrix>& psi, const std::vector<Vector>& alpha,
                            const InitialPair& init, int k);

/// Same, with the tables and gains of a global solve.
double representation_check(const ProblemData& p, const Solution& s, const InitialPair& init, int k);

/// Largest node-wise relative difference between the restarted state and the
/// equilibrium state one step after each restart.
double restart_consistency(const ProblemData& p, const ClosedLoop& eq);

struct FixedPairReport {
    std::vector<double> residuals;  ///< per k = t + i
    double max_residual = 0.0;
};

/// ‖(I − W_kW_k†)(H_kX*_k + β_k)‖ / (1 + ‖H_kX*_k + β_k‖) along the tree.
FixedPairReport solve_fixed_pair(const ProblemData& p, const GainSchedule& gains, const InitialPair& init);

struct CertificateOptions {
    int deviations = 4;
    std::uint64_t seed = 20240611;
    std::vector<double> scales{1.0, 0.1, 0.01};
    double stationary_tolerance = 1e-8;
    double convexity_tolerance = 1e-9;
    double gap_tolerance = 1e-9;
};

struct DeviationGap {
    int k = 0;
    double scale = 0.0;
    int sample = 0;
    double gap = 0.0;        ///< smallest over level-k nodes
    double tolerance = 0.0;  ///< gap_tolerance · (1 + |J*|)
};

struct EquilibriumCertificate {
    int t = 0;
    std::vector<double> stationary_residuals;
    std::vector<double> convexity_values;
    std::vector<double> convexity_tolerances;
    std::vector<DeviationGap> deviation_gaps;
    bool gaps_nonnegative = false;
    bool verdict = false;
    CertificateOptions options;
};

EquilibriumCertificate certify_equilibrium(const ProblemData& p, const InitialPair& init,
                                           const AdaptedProcess& u, const CertificateOptions& options = {});

}  // namespace mflq
