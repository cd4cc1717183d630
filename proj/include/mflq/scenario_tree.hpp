#pragma once

#include "mflq/matrix_ops.hpp"

#include <cstddef>
#include <vector>

namespace mflq {

/// Deepest tree built without an explicit override (2^14 leaves).
inline constexpr int kDefaultDepthCap = 14;

/// Values of one ℱ_level-measurable variable: one vector per level node.
/// A level-k node i has children 2i (noise +1) and 2i+1 (noise −1); its
/// level-s ancestor is i >> (k − s).
using LevelValues = std::vector<Vector>;

/// Complete binary tree carrying Rademacher noise. Nodes are implicit; the
/// object only fixes the depth and checks it against the cap.
class ScenarioTree {
public:
    /// Throws Error{HorizonMismatch} if depth < 0 or depth exceeds the cap
    /// and allow_deep is false.
    explicit ScenarioTree(int depth, bool allow_deep = false);

    int depth() const noexcept { return depth_; }

    static std::size_t width(int level) { return std::size_t{1} << level; }
    /// Noise realized on the step into `node` (level ≥ 1).
    static double noise(std::size_t node) { return (node & 1U) == 0 ? 1.0 : -1.0; }

private:
    int depth_;
};

/// E_s of a level-`level` variable, broadcast back to level `level`.
/// Subtree sums run in a fixed pairwise order.
LevelValues conditional_expectation(const LevelValues& v, int level, int s);

/// E_s of a level-`level` variable, one value per level-s node.
LevelValues conditional_means(const LevelValues& v, int level, int s);

/// E_ℓ[V_{ℓ+1}] from the level-(ℓ+1) values: ½(V(2i) + V(2i+1)).
LevelValues step_mean(const LevelValues& next);

/// E_ℓ[V_{ℓ+1} w_ℓ] from the level-(ℓ+1) values: ½(V(2i) − V(2i+1)).
LevelValues step_signed_mean(const LevelValues& next);

/// Adapted process on levels first … first + levels.size() − 1.
struct AdaptedProcess {
    int first = 0;
    std::vector<LevelValues> levels;

    int last() const { return first + static_cast<int>(levels.size()) - 1; }
    bool covers(int level) const { return level >= first && level <= last(); }
    LevelValues& at(int level);
    const LevelValues& at(int level) const;
};

/// Process equal to `value` at every node of levels first … last.
AdaptedProcess constant_process(int first, int last, const Vector& value);

/// Largest node-wise ‖a − b‖ over the common levels.
double max_difference(const AdaptedProcess& a, const AdaptedProcess& b);

}  // namespace mflq
