#include "mflq/scenario_tree.hpp"

#include "mflq/error.hpp"

#include <algorithm>
#include <string>

namespace mflq {

ScenarioTree::ScenarioTree(int depth, bool allow_deep) : depth_(depth) {
    if (depth < 0) {
        throw Error(ErrorKind::HorizonMismatch, "tree depth must be nonnegative");
    }
    if (depth > kDefaultDepthCap && !allow_deep) {
        throw Error(ErrorKind::HorizonMismatch,
                    "tree depth " + std::to_string(depth) + " exceeds the cap of " +
                        std::to_string(kDefaultDepthCap) + "; pass the override to build it");
    }
}

namespace {

Vector pairwise_sum(const LevelValues& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        return v[lo];
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace

LevelValues conditional_means(const LevelValues& v, int level, int s) {
    if (s < 0 || s > level || v.size() != ScenarioTree::width(level)) {
        throw Error(ErrorKind::HorizonMismatch, "conditional expectation at an invalid level");
    }
    const std::size_t groups = ScenarioTree::width(s);
    const std::size_t span = ScenarioTree::width(level - s);
    const double scale = 1.0 / static_cast<double>(span);
    LevelValues out(groups);
    for (std::size_t a = 0; a < groups; ++a) {
        out[a] = pairwise_sum(v, a * span, (a + 1) * span) * scale;
    }
    return out;
}

LevelValues conditional_expectation(const LevelValues& v, int level, int s) {
    const LevelValues means = conditional_means(v, level, s);
    const int shift = level - s;
    LevelValues out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = means[i >> shift];
    }
    return out;
}

LevelValues step_mean(const LevelValues& next) {
    LevelValues out(next.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 0.5 * (next[2 * i] + next[2 * i + 1]);
    }
    return out;
}

LevelValues step_signed_mean(const LevelValues& next) {
    LevelValues out(next.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 0.5 * (next[2 * i] - next[2 * i + 1]);
    }
    return out;
}

LevelValues& AdaptedProcess::at(int level) {
    if (!covers(level)) {
        throw Error(ErrorKind::HorizonMismatch, "process has no level " + std::to_string(level));
    }
    return levels[static_cast<std::size_t>(level - first)];
}

const LevelValues& AdaptedProcess::at(int level) const {
    if (!covers(level)) {
        throw Error(ErrorKind::HorizonMismatch, "process has no level " + std::to_string(level));
    }
    return levels[static_cast<std::size_t>(level - first)];
}

AdaptedProcess constant_process(int first, int last, const Vector& value) {
    AdaptedProcess p;
    p.first = first;
    for (int l = first; l <= last; ++l) {
        p.levels.emplace_back(ScenarioTree::width(l), value);
    }
    return p;
}

double max_difference(const AdaptedProcess& a, const AdaptedProcess& b) {
    double d = 0.0;
    for (int l = std::max(a.first, b.first); l <= std::min(a.last(), b.last()); ++l) {
        const LevelValues& x = a.at(l);
        const LevelValues& y = b.at(l);
        for (std::size_t i = 0; i < x.size(); ++i) {
            d = std::max(d, (x[i] - y[i]).norm());
        }
    }
    return d;
}

}  // namespace mflq
