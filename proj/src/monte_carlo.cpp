#include "mflq/monte_carlo.hpp"

#include "mflq/canonical_json.hpp"
#include "mflq/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

namespace mflq {

const char* to_string(NoiseLaw law) noexcept {
    return law == NoiseLaw::Rademacher ? "rademacher" : "gaussian";
}

NoiseLaw parse_noise_law(const std::string& name) {
    if (name == "rademacher") {
        return NoiseLaw::Rademacher;
    }
    if (name == "gaussian") {
        return NoiseLaw::Gaussian;
    }
    throw Error(ErrorKind::InvalidInput, "unknown noise law \"" + name + "\"");
}

namespace {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint64_t lane) {
    return mix64(mix64(mix64(seed) ^ path) ^ (step << 2 | lane));
}

// Uniform on (0, 1].
double unit_interval(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double counter_noise(std::uint64_t seed, std::uint64_t path, std::uint64_t step, NoiseLaw law) {
    if (law == NoiseLaw::Rademacher) {
        return (counter_bits(seed, path, step, 0) >> 63) == 0 ? 1.0 : -1.0;
    }
    const double u1 = unit_interval(counter_bits(seed, path, step, 0));
    const double u2 = unit_interval(counter_bits(seed, path, step, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int resolve_threads(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(n, 1);
    if (const char* env = std::getenv("MEANFIELD_LQ_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) {
            n = std::min(n, static_cast<int>(cap));
        }
    }
    return n;
}

namespace {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t b = 0; b < count; b += chunk) {
        pool.emplace_back(body, b, std::min(count, b + chunk));
    }
    for (auto& th : pool) {
        th.join();
    }
}

// Column sum in a fixed pairwise order.
Vector column_sum(const Matrix& m, Eigen::Index lo, Eigen::Index hi) {
    if (hi - lo <= 16) {
        Vector s = Vector::Zero(m.rows());
        for (Eigen::Index i = lo; i < hi; ++i) {
            s += m.col(i);
        }
        return s;
    }
    const Eigen::Index mid = lo + (hi - lo) / 2;
    return column_sum(m, lo, mid) + column_sum(m, mid, hi);
}

double scalar_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 16) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += v[i];
        }
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return scalar_sum(v, lo, mid) + scalar_sum(v, mid, hi);
}

Vector column_mean(const Matrix& m) { return column_sum(m, 0, m.cols()) / static_cast<double>(m.cols()); }

double mean_of(const std::vector<double>& v) { return scalar_sum(v, 0, v.size()) / static_cast<double>(v.size()); }

double std_error_of(const std::vector<double>& v) {
    if (v.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double mu = mean_of(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        sq[i] = (v[i] - mu) * (v[i] - mu);
    }
    const double var = scalar_sum(sq, 0, sq.size()) / static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
}

Matrix covariance_of(const Matrix& m, const Vector& mu, int threads) {
    const auto P = static_cast<std::size_t>(m.cols());
    std::vector<Matrix> outer(P);
    parallel_for(P, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Vector c = m.col(static_cast<Eigen::Index>(i)) - mu;
            outer[i] = c * c.transpose();
        }
    });
    // Pairwise reduction over paths, same order for any thread count.
    std::function<Matrix(std::size_t, std::size_t)> sum = [&](std::size_t lo, std::size_t hi) -> Matrix {
        if (hi - lo <= 16) {
            Matrix s = Matrix::Zero(m.rows(), m.rows());
            for (std::size_t i = lo; i < hi; ++i) {
                s += outer[i];
            }
            return s;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        return sum(lo, mid) + sum(mid, hi);
    };
    const double denom = P > 1 ? static_cast<double>(P - 1) : 1.0;
    return symmetrize(sum(0, P) / denom);
}

// Running cost of a population of paths for the system with initial-time
// index s. `plain` holds the per-path terms; `value` adds the mean-field
// terms linearized at the batch mean and feeds the standard error.
struct CostAccumulator {
    std::vector<double> value;
    std::vector<double> plain;
    double mean_field = 0.0;

    explicit CostAccumulator(std::size_t paths) : value(paths, 0.0), plain(paths, 0.0) {}

    void add(const Matrix& X, const Matrix& Q, const Matrix& Qbar, const Vector& q, int threads) {
        const Vector mu = column_mean(X);
        const Vector lin = 2.0 * (Qbar * mu);
        parallel_for(value.size(), threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const auto c = X.col(static_cast<Eigen::Index>(i));
                const double own = c.dot(Q * c) + 2.0 * q.dot(c);
                plain[i] += own;
                value[i] += own + lin.dot(c);
            }
        });
        mean_field += mu.dot(Qbar * mu);
    }

    double estimate() const { return mean_of(plain) + mean_field; }
};

struct Population {
    Matrix Xstar, Xcost;
};

void check_inputs(const ProblemData& p, int t, const Vector& x, const GainSchedule& gains, const SimConfig& cfg) {
    if (cfg.paths == 0) {
        throw Error(ErrorKind::EmptyConfig, "simulation needs at least one path");
    }
    if (t < 0 || t >= p.N) {
        throw Error(ErrorKind::HorizonMismatch, "initial time outside the horizon");
    }
    if (gains.horizon() != p.N) {
        throw Error(ErrorKind::HorizonMismatch, "gains do not cover the horizon");
    }
    if (x.size() != p.n) {
        throw Error(ErrorKind::DimensionMismatch, "initial state has the wrong dimension");
    }
}

// One step of the system with initial-time index s, batch means standing in
// for E_s.
void advance_cost_state(const ProblemData& p, int s, int k, Matrix& X, const Matrix& u, const std::vector<double>& w,
                        int threads) {
    const Vector EX = column_mean(X);
    const Vector Eu = column_mean(u);
    const Vector drift_shift = p.Abar(s, k) * EX + p.Bbar(s, k) * Eu + p.f(s, k);
    const Vector diff_shift = p.Cbar(s, k) * EX + p.Dbar(s, k) * Eu + p.d(s, k);
    const Matrix &A = p.A(s, k), &B = p.B(s, k), &C = p.C(s, k), &D = p.D(s, k);
    parallel_for(w.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            const Vector xi = X.col(j);
            const Vector drift = A * xi + B * u.col(j) + drift_shift;
            const Vector diffusion = C * xi + D * u.col(j) + diff_shift;
            X.col(j) = drift + diffusion * w[i];
        }
    });
}

void advance_equilibrium(const ProblemData& p, int k, Matrix& X, const Matrix& u, const std::vector<double>& w,
                         int threads) {
    const Matrix Acal = p.A_cal(k, k), Bcal = p.B_cal(k, k), Ccal = p.C_cal(k, k), Dcal = p.D_cal(k, k);
    parallel_for(w.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            const Vector xi = X.col(j);
            const Vector drift = Acal * xi + Bcal * u.col(j) + p.f(k, k);
            const Vector diffusion = Ccal * xi + Dcal * u.col(j) + p.d(k, k);
            X.col(j) = drift + diffusion * w[i];
        }
    });
}

Matrix feedback(const GainSchedule& g, int k, const Matrix& X, int threads) {
    const auto ki = static_cast<std::size_t>(k);
    Matrix u(g.Psi[ki].rows(), X.cols());
    parallel_for(static_cast<std::size_t>(X.cols()), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            u.col(j) = g.Psi[ki] * X.col(j) + g.alpha[ki];
        }
    });
    return u;
}

std::vector<double> draw(const SimConfig& cfg, int step, int threads) {
    std::vector<double> w(cfg.paths);
    parallel_for(cfg.paths, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            w[i] = counter_noise(cfg.seed, i, static_cast<std::uint64_t>(step), cfg.law);
        }
    });
    return w;
}

}  // namespace

SimResult simulate(const ProblemData& p, int t, const Vector& x, const GainSchedule& gains, const SimConfig& cfg) {
    check_inputs(p, t, x, gains, cfg);
    const int threads = resolve_threads(cfg.threads);
    const auto P = static_cast<Eigen::Index>(cfg.paths);

    Matrix Xstar = x.replicate(1, P);
    Matrix Xcost = Xstar;
    CostAccumulator acc(cfg.paths);
    SimResult r;
    r.t = t;
    r.paths = cfg.paths;
    const std::size_t keep = std::min(cfg.retained_paths, cfg.paths);
    r.path_sample.assign(keep, {});

    const auto record = [&]() {
        const Vector mu = column_mean(Xstar);
        r.mean.push_back(mu);
        r.covariance.push_back(covariance_of(Xstar, mu, threads));
        for (std::size_t i = 0; i < keep; ++i) {
            r.path_sample[i].push_back(Xstar.col(static_cast<Eigen::Index>(i)));
        }
    };

    for (int k = t; k < p.N; ++k) {
        record();
        const Matrix u = feedback(gains, k, Xstar, threads);
        acc.add(Xcost, p.Q(t, k), p.Qbar(t, k), p.q(t, k), threads);
        acc.add(u, p.R(t, k), p.Rbar(t, k), p.rho(t, k), threads);
        const std::vector<double> w = draw(cfg, k, threads);
        advance_cost_state(p, t, k, Xcost, u, w, threads);
        advance_equilibrium(p, k, Xstar, u, w, threads);
    }
    record();
    acc.add(Xcost, p.G_at(t), p.Gbar_at(t), p.g_at(t), threads);

    r.mean_cost = acc.estimate();
    r.std_error = std_error_of(acc.value);
    return r;
}

GapEstimate estimate_deviation_gap(const ProblemData& p, int t, const Vector& x, const GainSchedule& gains, int k,
                                   std::size_t atom, const Vector& perturbation, const SimConfig& cfg) {
    check_inputs(p, t, x, gains, cfg);
    if (k < t || k >= p.N) {
        throw Error(ErrorKind::HorizonMismatch, "deviation step outside the horizon");
    }
    if ((atom >> (k - t)) != 0) {
        throw Error(ErrorKind::HorizonMismatch, "conditioning node outside the level");
    }
    if (perturbation.size() != p.m) {
        throw Error(ErrorKind::DimensionMismatch, "perturbation has the wrong dimension");
    }
    const int threads = resolve_threads(cfg.threads);

    // Equilibrium state along the conditioning history.
    Vector start = x;
    for (int j = t; j < k; ++j) {
        const auto ji = static_cast<std::size_t>(j);
        const std::size_t node = atom >> (k - j - 1);
        const double w = (node & 1U) == 0 ? 1.0 : -1.0;
        const Vector u = gains.Psi[ji] * start + gains.alpha[ji];
        start = p.A_cal(j, j) * start + p.B_cal(j, j) * u + p.f(j, j) +
                (p.C_cal(j, j) * start + p.D_cal(j, j) * u + p.d(j, j)) * w;
    }

    const auto P = static_cast<Eigen::Index>(cfg.paths);
    Matrix Xstar = start.replicate(1, P);
    Matrix Xa = Xstar;
    Matrix Xb = Xstar;
    CostAccumulator ca(cfg.paths), cb(cfg.paths);
    for (int l = k; l < p.N; ++l) {
        const Matrix u = feedback(gains, l, Xstar, threads);
        Matrix ub = u;
        if (l == k) {
            ub.colwise() += perturbation;
        }
        ca.add(Xa, p.Q(k, l), p.Qbar(k, l), p.q(k, l), threads);
        ca.add(u, p.R(k, l), p.Rbar(k, l), p.rho(k, l), threads);
        cb.add(Xb, p.Q(k, l), p.Qbar(k, l), p.q(k, l), threads);
        cb.add(ub, p.R(k, l), p.Rbar(k, l), p.rho(k, l), threads);
        const std::vector<double> w = draw(cfg, l, threads);
        advance_cost_state(p, k, l, Xa, u, w, threads);
        advance_cost_state(p, k, l, Xb, ub, w, threads);
        advance_equilibrium(p, l, Xstar, u, w, threads);
    }
    ca.add(Xa, p.G_at(k), p.Gbar_at(k), p.g_at(k), threads);
    cb.add(Xb, p.G_at(k), p.Gbar_at(k), p.g_at(k), threads);

    std::vector<double> diff(cfg.paths);
    for (std::size_t i = 0; i < cfg.paths; ++i) {
        diff[i] = cb.value[i] - ca.value[i];
    }
    GapEstimate g;
    g.start = start;
    g.gap = cb.estimate() - ca.estimate();
    g.std_error = std_error_of(diff);
    const double sa = std_error_of(ca.value), sb = std_error_of(cb.value);
    g.unpaired_std_error = std::sqrt(sa * sa + sb * sb);
    return g;
}

std::string moments_csv(const SimResult& r) {
    std::string out = "k";
    const Eigen::Index n = r.mean.empty() ? 0 : r.mean.front().size();
    for (Eigen::Index i = 0; i < n; ++i) {
        out += ",mean_" + std::to_string(i);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out += ",cov_" + std::to_string(i) + "_" + std::to_string(j);
        }
    }
    out += "\n";
    for (std::size_t l = 0; l < r.mean.size(); ++l) {
        out += std::to_string(r.t + static_cast<int>(l));
        for (Eigen::Index i = 0; i < n; ++i) {
            out += "," + format_double(r.mean[l](i));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                out += "," + format_double(r.covariance[l](i, j));
            }
        }
        out += "\n";
    }
    return out;
}

}  // namespace mflq
