#include "mflq/scenario.hpp"

#include "mflq/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace mflq {

namespace {

void check_start(const ProblemData& p, int s, const LevelValues& x) {
    if (s < 0 || s >= p.N) {
        throw Error(ErrorKind::HorizonMismatch, "start level outside the horizon");
    }
    if (x.size() != ScenarioTree::width(s)) {
        throw Error(ErrorKind::HorizonMismatch, "initial state needs one value per level-s node");
    }
}

void check_control(const ProblemData& p, int s, const AdaptedProcess& u) {
    if (!u.covers(s) || !u.covers(p.N - 1)) {
        throw Error(ErrorKind::HorizonMismatch, "control must cover every step from the start level");
    }
}

// Scalar per-node values wrapped as 1-vectors so conditional_means applies.
LevelValues as_values(const std::vector<double>& v) {
    LevelValues out(v.size(), Vector(1));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i](0) = v[i];
    }
    return out;
}

std::vector<double> unwrap(const LevelValues& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i](0);
    }
    return out;
}

Vector random_unit(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> normal;
    Vector v(dim);
    do {
        for (int i = 0; i < dim; ++i) {
            v(i) = normal(rng);
        }
    } while (v.norm() == 0.0);
    return v / v.norm();
}

}  // namespace

AdaptedProcess roll_forward(const ProblemData& p, int s, const LevelValues& x, const AdaptedProcess& u) {
    check_start(p, s, x);
    check_control(p, s, u);
    AdaptedProcess X;
    X.first = s;
    X.levels.push_back(x);
    for (int k = s; k < p.N; ++k) {
        const LevelValues& Xk = X.levels.back();
        const LevelValues& uk = u.at(k);
        const LevelValues EX = conditional_expectation(Xk, k, s);
        const LevelValues Eu = conditional_expectation(uk, k, s);
        LevelValues next(ScenarioTree::width(k + 1));
        for (std::size_t i = 0; i < Xk.size(); ++i) {
            const Vector drift = p.A(s, k) * Xk[i] + p.Abar(s, k) * EX[i] + p.B(s, k) * uk[i] +
                                 p.Bbar(s, k) * Eu[i] + p.f(s, k);
            const Vector diffusion = p.C(s, k) * Xk[i] + p.Cbar(s, k) * EX[i] + p.D(s, k) * uk[i] +
                                     p.Dbar(s, k) * Eu[i] + p.d(s, k);
            next[2 * i] = drift + diffusion;
            next[2 * i + 1] = drift - diffusion;
        }
        X.levels.push_back(std::move(next));
    }
    return X;
}

std::vector<double> cost(const ProblemData& p, int s, const AdaptedProcess& X, const AdaptedProcess& u) {
    const std::size_t roots = ScenarioTree::width(s);
    std::vector<double> total(roots, 0.0);

    const auto add_level = [&](int level, const LevelValues& Xl, const Matrix& Q, const Matrix& Qbar,
                               const Vector& q) {
        std::vector<double> pointwise(Xl.size());
        for (std::size_t i = 0; i < Xl.size(); ++i) {
            pointwise[i] = Xl[i].dot(Q * Xl[i]) + 2.0 * q.dot(Xl[i]);
        }
        const std::vector<double> mean = unwrap(conditional_means(as_values(pointwise), level, s));
        const LevelValues EX = conditional_means(Xl, level, s);
        for (std::size_t a = 0; a < roots; ++a) {
            total[a] += mean[a] + EX[a].dot(Qbar * EX[a]);
        }
    };

    for (int k = s; k < p.N; ++k) {
        add_level(k, X.at(k), p.Q(s, k), p.Qbar(s, k), p.q(s, k));
        add_level(k, u.at(k), p.R(s, k), p.Rbar(s, k), p.rho(s, k));
    }
    add_level(p.N, X.at(p.N), p.G_at(s), p.Gbar_at(s), p.g_at(s));
    return total;
}

std::vector<double> cost(const ProblemData& p, int s, const LevelValues& x, const AdaptedProcess& u) {
    return cost(p, s, roll_forward(p, s, x, u), u);
}

AdaptedProcess equilibrium_state(const ProblemData& p, const InitialPair& init, const AdaptedProcess& u) {
    check_start(p, init.t, init.x);
    check_control(p, init.t, u);
    AdaptedProcess X;
    X.first = init.t;
    X.levels.push_back(init.x);
    for (int k = init.t; k < p.N; ++k) {
        const LevelValues& Xk = X.levels.back();
        const LevelValues& uk = u.at(k);
        const Matrix Acal = p.A_cal(k, k), Bcal = p.B_cal(k, k);
        const Matrix Ccal = p.C_cal(k, k), Dcal = p.D_cal(k, k);
        LevelValues next(ScenarioTree::width(k + 1));
        for (std::size_t i = 0; i < Xk.size(); ++i) {
            const Vector drift = Acal * Xk[i] + Bcal * uk[i] + p.f(k, k);
            const Vector diffusion = Ccal * Xk[i] + Dcal * uk[i] + p.d(k, k);
            next[2 * i] = drift + diffusion;
            next[2 * i + 1] = drift - diffusion;
        }
        X.levels.push_back(std::move(next));
    }
    return X;
}

ClosedLoop closed_loop(const ProblemData& p, const std::vector<Matrix>& psi,
                       const std::vector<Vector>& alpha, const InitialPair& init) {
    check_start(p, init.t, init.x);
    if (psi.size() != static_cast<std::size_t>(p.N) || alpha.size() != static_cast<std::size_t>(p.N)) {
        throw Error(ErrorKind::HorizonMismatch, "feedback must list one entry per step");
    }
    ClosedLoop out;
    out.X.first = init.t;
    out.u.first = init.t;
    out.X.levels.push_back(init.x);
    for (int k = init.t; k < p.N; ++k) {
        const auto ki = static_cast<std::size_t>(k);
        const LevelValues& Xk = out.X.levels.back();
        LevelValues uk(Xk.size());
        for (std::size_t i = 0; i < Xk.size(); ++i) {
            uk[i] = psi[ki] * Xk[i] + alpha[ki];
        }
        const Matrix Acal = p.A_cal(k, k), Bcal = p.B_cal(k, k);
        const Matrix Ccal = p.C_cal(k, k), Dcal = p.D_cal(k, k);
        LevelValues next(ScenarioTree::width(k + 1));
        for (std::size_t i = 0; i < Xk.size(); ++i) {
            const Vector drift = Acal * Xk[i] + Bcal * uk[i] + p.f(k, k);
            const Vector diffusion = Ccal * Xk[i] + Dcal * uk[i] + p.d(k, k);
            next[2 * i] = drift + diffusion;
            next[2 * i + 1] = drift - diffusion;
        }
        out.u.levels.push_back(std::move(uk));
        out.X.levels.push_back(std::move(next));
    }
    return out;
}

ClosedLoop closed_loop(const ProblemData& p, const GainSchedule& gains, const InitialPair& init) {
    return closed_loop(p, gains.Psi, gains.alpha, init);
}

AdaptedProcess solve_bsde(const ProblemData& p, int k, const AdaptedProcess& X) {
    if (k < 0 || k >= p.N || !X.covers(k) || !X.covers(p.N)) {
        throw Error(ErrorKind::HorizonMismatch, "state must cover levels k through N");
    }
    const int N = p.N;
    std::vector<LevelValues> rev;
    {
        const LevelValues& XN = X.at(N);
        const LevelValues EX = conditional_expectation(XN, N, k);
        LevelValues ZN(XN.size());
        for (std::size_t i = 0; i < XN.size(); ++i) {
            ZN[i] = p.G_at(k) * XN[i] + p.Gbar_at(k) * EX[i] + p.g_at(k);
        }
        rev.push_back(std::move(ZN));
    }
    for (int l = N - 1; l >= k; --l) {
        const LevelValues& Zn = rev.back();
        const LevelValues m = step_mean(Zn);
        const LevelValues sm = step_signed_mean(Zn);
        const LevelValues EkZ = conditional_expectation(m, l, k);
        const LevelValues EkZw = conditional_expectation(sm, l, k);
        const LevelValues& Xl = X.at(l);
        const LevelValues EkX = conditional_expectation(Xl, l, k);
        const Matrix At = p.A(k, l).transpose(), Abt = p.Abar(k, l).transpose();
        const Matrix Ct = p.C(k, l).transpose(), Cbt = p.Cbar(k, l).transpose();
        LevelValues Z(Xl.size());
        for (std::size_t i = 0; i < Xl.size(); ++i) {
            Z[i] = At * m[i] + Abt * EkZ[i] + Ct * sm[i] + Cbt * EkZw[i] + p.Q(k, l) * Xl[i] +
                   p.Qbar(k, l) * EkX[i] + p.q(k, l);
        }
        rev.push_back(std::move(Z));
    }
    AdaptedProcess out;
    out.first = k;
    out.levels.assign(rev.rbegin(), rev.rend());
    return out;
}

Gradient stationarity_gradient(const ProblemData& p, int k, const AdaptedProcess& Z, const LevelValues& uk) {
    const LevelValues m = step_mean(Z.at(k + 1));
    const LevelValues sm = step_signed_mean(Z.at(k + 1));
    const Matrix Rcal = p.R_cal(k, k);
    const Matrix Bt = p.B_cal(k, k).transpose();
    const Matrix Dt = p.D_cal(k, k).transpose();
    const Vector& rho = p.rho(k, k);
    Gradient g;
    g.value.resize(uk.size());
    g.scale.resize(uk.size());
    for (std::size_t i = 0; i < uk.size(); ++i) {
        const Vector a = Rcal * uk[i];
        const Vector b = Bt * m[i];
        const Vector c = Dt * sm[i];
        g.value[i] = a + b + c + rho;
        g.scale[i] = a.norm() + b.norm() + c.norm() + rho.norm();
    }
    return g;
}

std::vector<double> stationarity_residual(const ProblemData& p, const InitialPair& init,
                                          const AdaptedProcess& u) {
    const AdaptedProcess Xstar = equilibrium_state(p, init, u);
    std::vector<double> out;
    for (int k = init.t; k < p.N; ++k) {
        const AdaptedProcess Xk = roll_forward(p, k, Xstar.at(k), u);
        const AdaptedProcess Z = solve_bsde(p, k, Xk);
        const Gradient g = stationarity_gradient(p, k, Z, u.at(k));
        double worst = 0.0;
        for (std::size_t i = 0; i < g.value.size(); ++i) {
            worst = std::max(worst, g.value[i].norm() / (1.0 + g.scale[i]));
        }
        out.push_back(worst);
    }
    return out;
}

JhatValue jhat(const ProblemData& p, int k, const LevelValues& ubar) {
    check_start(p, k, ubar);
    const std::size_t roots = ubar.size();
    JhatValue out;
    out.value.assign(roots, 0.0);
    out.magnitude.assign(roots, 0.0);

    const auto add_level = [&](int level, const LevelValues& Y, const Matrix& Q, const Matrix& Qbar) {
        std::vector<double> pointwise(Y.size());
        for (std::size_t i = 0; i < Y.size(); ++i) {
            pointwise[i] = Y[i].dot(Q * Y[i]);
        }
        const std::vector<double> mean = unwrap(conditional_means(as_values(pointwise), level, k));
        const LevelValues EY = conditional_means(Y, level, k);
        for (std::size_t a = 0; a < roots; ++a) {
            const double mf = EY[a].dot(Qbar * EY[a]);
            out.value[a] += mean[a] + mf;
            out.magnitude[a] += std::abs(mean[a]) + std::abs(mf);
        }
    };

    const Matrix Rcal = p.R_cal(k, k);
    for (std::size_t a = 0; a < roots; ++a) {
        const double r = ubar[a].dot(Rcal * ubar[a]);
        out.value[a] += r;
        out.magnitude[a] += std::abs(r);
    }
    LevelValues Y(ScenarioTree::width(k + 1));
    const Matrix Bcal = p.B_cal(k, k), Dcal = p.D_cal(k, k);
    for (std::size_t i = 0; i < roots; ++i) {
        const Vector drift = Bcal * ubar[i];
        const Vector diffusion = Dcal * ubar[i];
        Y[2 * i] = drift + diffusion;
        Y[2 * i + 1] = drift - diffusion;
    }
    for (int l = k + 1; l < p.N; ++l) {
        add_level(l, Y, p.Q(k, l), p.Qbar(k, l));
        const LevelValues EY = conditional_expectation(Y, l, k);
        LevelValues next(ScenarioTree::width(l + 1));
        for (std::size_t i = 0; i < Y.size(); ++i) {
            const Vector drift = p.A(k, l) * Y[i] + p.Abar(k, l) * EY[i];
            const Vector diffusion = p.C(k, l) * Y[i] + p.Cbar(k, l) * EY[i];
            next[2 * i] = drift + diffusion;
            next[2 * i + 1] = drift - diffusion;
        }
        Y = std::move(next);
    }
    add_level(p.N, Y, p.G_at(k), p.Gbar_at(k));
    return out;
}

double difference_formula_check(const ProblemData& p, int k, const LevelValues& zeta,
                                const AdaptedProcess& u, const LevelValues& ubar, double lambda) {
    check_start(p, k, zeta);
    check_control(p, k, u);
    if (ubar.size() != zeta.size()) {
        throw Error(ErrorKind::HorizonMismatch, "perturbation must live on level k");
    }
    AdaptedProcess moved = u;
    for (std::size_t i = 0; i < ubar.size(); ++i) {
        moved.at(k)[i] += lambda * ubar[i];
    }
    const AdaptedProcess X = roll_forward(p, k, zeta, u);
    const std::vector<double> J0 = cost(p, k, X, u);
    const std::vector<double> J1 = cost(p, k, zeta, moved);
    const AdaptedProcess Z = solve_bsde(p, k, X);
    const Gradient g = stationarity_gradient(p, k, Z, u.at(k));
    const JhatValue jh = jhat(p, k, ubar);
    double worst = 0.0;
    for (std::size_t i = 0; i < ubar.size(); ++i) {
        const double rhs = 2.0 * lambda * g.value[i].dot(ubar[i]) + lambda * lambda * jh.value[i];
        const double lhs = J1[i] - J0[i];
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(J1[i]) + std::abs(J0[i])));
    }
    return worst;
}

namespace {

double representation_residual(const ProblemData& p, const ClosedLoop& eq, int k,
                               const std::function<Matrix(int)>& P, const std::function<Matrix(int)>& Pcal,
                               const std::function<Matrix(int)>& T, const std::function<Matrix(int)>& Tcal,
                               const std::function<Vector(int)>& pi) {
    const AdaptedProcess Xk = roll_forward(p, k, eq.X.at(k), eq.u);
    const AdaptedProcess Z = solve_bsde(p, k, Xk);
    double worst = 0.0;
    for (int l = k; l <= p.N; ++l) {
        const LevelValues& X = Xk.at(l);
        const LevelValues& Xs = eq.X.at(l);
        const LevelValues EX = conditional_expectation(X, l, k);
        const LevelValues EXs = conditional_expectation(Xs, l, k);
        const Matrix Pl = P(l), Pcl = Pcal(l), Tl = T(l), Tcl = Tcal(l);
        const Vector pil = pi(l);
        for (std::size_t i = 0; i < X.size(); ++i) {
            const Vector predicted =
                Pl * (X[i] - EX[i]) + Pcl * EX[i] + Tl * (Xs[i] - EXs[i]) + Tcl * EXs[i] + pil;
            const Vector& z = Z.at(l)[i];
            worst = std::max(worst, (z - predicted).norm() / (1.0 + z.norm()));
        }
    }
    return worst;
}

}  // namespace

double representation_check(const ProblemData& p, const RecursionTables& sym, const std::vector<Matrix>& psi,
                            const std::vector<Vector>& alpha, const InitialPair& init, int k) {
    if (k < init.t || k >= p.N) {
        throw Error(ErrorKind::HorizonMismatch, "restart level outside the horizon");
    }
    const FeedbackTables ft = feedback_tables(p, sym, psi, alpha, k);
    const ClosedLoop eq = closed_loop(p, psi, alpha, init);
    const auto at = [k](int l) { return static_cast<std::size_t>(l - k); };
    return representation_residual(
        p, eq, k, [&](int l) { return sym.P(k, l); }, [&](int l) { return sym.Pcal(k, l); },
        [&](int l) { return ft.T[at(l)]; }, [&](int l) { return ft.Tcal[at(l)]; },
        [&](int l) { return ft.pi[at(l)]; });
}

double representation_check(const ProblemData& p, const Solution& s, const InitialPair& init, int k) {
    if (k < init.t || k >= p.N) {
        throw Error(ErrorKind::HorizonMismatch, "restart level outside the horizon");
    }
    const ClosedLoop eq = closed_loop(p, s.gains, init);
    const RecursionTables& tb = s.tables;
    return representation_residual(
        p, eq, k, [&](int l) { return tb.P(k, l); }, [&](int l) { return tb.Pcal(k, l); },
        [&](int l) { return tb.T(k, l); }, [&](int l) { return tb.Tcal(k, l); },
        [&](int l) { return tb.pi(k, l); });
}

double restart_consistency(const ProblemData& p, const ClosedLoop& eq) {
    double worst = 0.0;
    for (int k = eq.X.first; k < p.N; ++k) {
        const AdaptedProcess Xk = roll_forward(p, k, eq.X.at(k), eq.u);
        const LevelValues& a = Xk.at(k + 1);
        const LevelValues& b = eq.X.at(k + 1);
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, (a[i] - b[i]).norm() / (1.0 + b[i].norm()));
        }
    }
    return worst;
}

FixedPairReport solve_fixed_pair(const ProblemData& p, const GainSchedule& gains, const InitialPair& init) {
    if (gains.horizon() != p.N) {
        throw Error(ErrorKind::HorizonMismatch, "gains do not cover the horizon");
    }
    const ClosedLoop eq = closed_loop(p, gains, init);
    FixedPairReport r;
    for (int k = init.t; k < p.N; ++k) {
        const auto ki = static_cast<std::size_t>(k);
        const Matrix proj = Matrix::Identity(p.m, p.m) - gains.W[ki] * gains.Wdag[ki];
        double worst = 0.0;
        for (const Vector& x : eq.X.at(k)) {
            const Vector v = gains.H[ki] * x + gains.beta[ki];
            worst = std::max(worst, (proj * v).norm() / (1.0 + v.norm()));
        }
        r.residuals.push_back(worst);
        r.max_residual = std::max(r.max_residual, worst);
    }
    return r;
}

EquilibriumCertificate certify_equilibrium(const ProblemData& p, const InitialPair& init,
                                           const AdaptedProcess& u, const CertificateOptions& options) {
    EquilibriumCertificate c;
    c.t = init.t;
    c.options = options;
    c.stationary_residuals = stationarity_residual(p, init, u);

    std::mt19937_64 rng(options.seed);
    const AdaptedProcess Xstar = equilibrium_state(p, init, u);
    bool convex = true;
    bool gaps_ok = true;
    for (int k = init.t; k < p.N; ++k) {
        const std::size_t width = ScenarioTree::width(k);
        double worst = std::numeric_limits<double>::infinity();
        double worst_tol = 0.0;
        const auto probe = [&](const LevelValues& ubar) {
            const JhatValue jh = jhat(p, k, ubar);
            for (std::size_t i = 0; i < width; ++i) {
                const double tol = options.convexity_tolerance * (1.0 + jh.magnitude[i]);
                if (jh.value[i] < worst) {
                    worst = jh.value[i];
                    worst_tol = tol;
                }
                convex = convex && jh.value[i] >= -tol;
            }
        };
        for (int j = 0; j < p.m; ++j) {
            probe(LevelValues(width, Vector::Unit(p.m, j)));
        }
        for (int s = 0; s < options.deviations; ++s) {
            LevelValues ubar(width);
            for (auto& v : ubar) {
                v = random_unit(rng, p.m);
            }
            probe(ubar);
        }
        c.convexity_values.push_back(worst);
        c.convexity_tolerances.push_back(worst_tol);

        const AdaptedProcess Xk = roll_forward(p, k, Xstar.at(k), u);
        const std::vector<double> base = cost(p, k, Xk, u);
        for (int s = 0; s < options.deviations; ++s) {
            LevelValues direction(width);
            for (auto& v : direction) {
                v = random_unit(rng, p.m);
            }
            for (double scale : options.scales) {
                AdaptedProcess moved = u;
                for (std::size_t i = 0; i < width; ++i) {
                    moved.at(k)[i] += scale * direction[i];
                }
                const std::vector<double> dev = cost(p, k, Xstar.at(k), moved);
                DeviationGap g{k, scale, s, std::numeric_limits<double>::infinity(), 0.0};
                for (std::size_t i = 0; i < width; ++i) {
                    const double gap = dev[i] - base[i];
                    const double tol = options.gap_tolerance * (1.0 + std::abs(base[i]));
                    if (gap < g.gap) {
                        g.gap = gap;
                        g.tolerance = tol;
                    }
                    gaps_ok = gaps_ok && gap >= -tol;
                }
                c.deviation_gaps.push_back(g);
            }
        }
    }
    const bool stationary =
        std::all_of(c.stationary_residuals.begin(), c.stationary_residuals.end(),
                    [&](double r) { return r <= options.stationary_tolerance; });
    c.gaps_nonnegative = gaps_ok;
    c.verdict = stationary && convex;
    return c;
}

}  // namespace mflq
