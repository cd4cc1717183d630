#pragma once

#include "mflq/problem.hpp"
#include "mflq/recursion.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mflq {

enum class NoiseLaw { Rademacher, Gaussian };

const char* to_string(NoiseLaw law) noexcept;
/// Accepts "rademacher" and "gaussian"; throws Error{InvalidInput} otherwise.
NoiseLaw parse_noise_law(const std::string& name);

struct SimConfig {
    std::size_t paths = 10000;
    std::uint64_t seed = 0;
    NoiseLaw law = NoiseLaw::Rademacher;
    int threads = 0;                  ///< 0: hardware concurrency
    std::size_t retained_paths = 0;   ///< equilibrium-state paths copied into the result
};

/// Noise value for (seed, path, step). Depends on nothing else, so results
/// do not change with the thread count or the order paths are processed in.
double counter_noise(std::uint64_t seed, std::uint64_t path, std::uint64_t step, NoiseLaw law);

/// Worker count: the request (or hardware concurrency when 0), capped by the
/// MEANFIELD_LQ_THREADS environment variable when it holds a positive integer.
int resolve_threads(int requested);

struct SimResult {
    int t = 0;
    std::size_t paths = 0;
    double mean_cost = 0.0;
    double std_error = 0.0;  ///< NaN for a single path
    std::vector<Vector> mean;        ///< per level t … N, equilibrium state
    std::vector<Matrix> covariance;  ///< same levels
    std::vector<std::vector<Vector>> path_sample;  ///< [path][level]
};

/// Simulates the equilibrium state from (t, x) and estimates J(t, x; u*).
/// Expectations E_t are cross-path means. Throws Error{EmptyConfig} when
/// paths is 0 and Error{HorizonMismatch} for bad t or gains.
SimResult simulate(const ProblemData& p, int t, const Vector& x, const GainSchedule& gains,
                   const SimConfig& cfg);

struct GapEstimate {
    double gap = 0.0;
    double std_error = 0.0;
    /// Standard error the same paths would give without pairing.
    double unpaired_std_error = 0.0;
    Vector start;  ///< X*_k at the conditioning node
};

/// Paired estimate of J(k, X*_k; (u*_k + δ, u*|k+1)) − J(k, X*_k; u*) where
/// X*_k is reached from (t, x) along the Rademacher history `atom` (a node
/// index among the 2^(k−t) level-k descendants, child 2i = +1).
GapEstimate estimate_deviation_gap(const ProblemData& p, int t, const Vector& x, const GainSchedule& gains,
                                   int k, std::size_t atom, const Vector& perturbation, const SimConfig& cfg);

/// One row per level: k, means, then covariance entries row-major.
std::string moments_csv(const SimResult& r);

}  // namespace mflq
