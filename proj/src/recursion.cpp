#include "mflq/recursion.hpp"

#include "mflq/error.hpp"

#include <algorithm>
#include <cmath>

namespace mflq {

namespace {

struct StepGains {
    Matrix W, Wdag, H, Psi;
    Vector beta, alpha;
};

StepGains finish_gains(Matrix W, Matrix H, Vector beta) {
    StepGains g;
    g.Wdag = pinv(W);
    g.Psi = -(g.Wdag * H);
    g.alpha = -(g.Wdag * beta);
    g.W = std::move(W);
    g.H = std::move(H);
    g.beta = std::move(beta);
    return g;
}

void store(GainSchedule& s, int k, StepGains g) {
    const auto i = static_cast<std::size_t>(k);
    s.W[i] = std::move(g.W);
    s.Wdag[i] = std::move(g.Wdag);
    s.H[i] = std::move(g.H);
    s.beta[i] = std::move(g.beta);
    s.Psi[i] = std::move(g.Psi);
    s.alpha[i] = std::move(g.alpha);
}

GainSchedule empty_schedule(int N) {
    GainSchedule s;
    const auto n = static_cast<std::size_t>(N);
    s.W.resize(n);
    s.Wdag.resize(n);
    s.H.resize(n);
    s.beta.resize(n);
    s.Psi.resize(n);
    s.alpha.resize(n);
    return s;
}

SolvabilityReport make_report(const GainSchedule& gains, const ConvexityResult& conv,
                              double range_tol) {
    SolvabilityReport r;
    r.range_tolerance = range_tol;
    bool ok = true;
    for (std::size_t k = 0; k < gains.W.size(); ++k) {
        r.convexity_margins.push_back(conv.verdicts[k].min_eigenvalue);
        r.convexity_tolerances.push_back(conv.verdicts[k].tolerance_used);
        r.rangeH_residuals.push_back(range_residual(gains.W[k], gains.H[k]));
        r.rangeBeta_residuals.push_back(range_residual(gains.W[k], gains.beta[k]));
        ok = ok && conv.verdicts[k].is_psd && r.rangeH_residuals.back() <= range_tol &&
             r.rangeBeta_residuals.back() <= range_tol;
    }
    r.verdict_all_pairs = ok;
    r.per_pair_note =
        "for a fixed initial pair only (I - W W+)(H X* + beta) = 0 along the equilibrium "
        "state is required; check it with solve_fixed_pair on a scenario tree";
    return r;
}

}  // namespace

RecursionTables solve_symmetric(const ProblemData& p) {
    const int N = p.N;
    RecursionTables tb;
    tb.P = Family<Matrix>(N, N);
    tb.Pcal = Family<Matrix>(N, N);
    tb.T = Family<Matrix>(N, N);
    tb.Tcal = Family<Matrix>(N, N);
    tb.pi = Family<Vector>(N, N);
    for (int k = 0; k < N; ++k) {
        tb.P(k, N) = p.G_at(k);
        tb.Pcal(k, N) = p.G_cal(k);
        tb.T(k, N) = Matrix::Zero(p.n, p.n);
        tb.Tcal(k, N) = Matrix::Zero(p.n, p.n);
        tb.pi(k, N) = p.g_at(k);
        for (int l = N - 1; l >= k; --l) {
            const Matrix& P1 = tb.P(k, l + 1);
            const Matrix& Pc1 = tb.Pcal(k, l + 1);
            const Matrix& A = p.A(k, l);
            const Matrix& C = p.C(k, l);
            const Matrix Acal = p.A_cal(k, l);
            const Matrix Ccal = p.C_cal(k, l);
            tb.P(k, l) = symmetrize(p.Q(k, l) + A.transpose() * P1 * A + C.transpose() * P1 * C);
            tb.Pcal(k, l) = symmetrize(p.Q_cal(k, l) + Acal.transpose() * Pc1 * Acal +
                                       Ccal.transpose() * P1 * Ccal);
        }
    }
    return tb;
}

ConvexityResult convexity_margins(const ProblemData& p, const RecursionTables& tables) {
    ConvexityResult out;
    for (int k = 0; k < p.N; ++k) {
        const Matrix Bcal = p.B_cal(k, k);
        const Matrix Dcal = p.D_cal(k, k);
        Matrix M2 = p.R_cal(k, k) + Bcal.transpose() * tables.Pcal(k, k + 1) * Bcal +
                    Dcal.transpose() * tables.P(k, k + 1) * Dcal;
        out.verdicts.push_back(psd_check(M2));
        out.M2.push_back(std::move(M2));
    }
    return out;
}

Solution solve_gdre_global(const ProblemData& p, RecursionTables tables, const SolveOptions& options) {
    const int N = p.N;
    GainSchedule gains = empty_schedule(N);
    RecursionTables& tb = tables;

    for (int k = N - 1; k >= 0; --k) {
        for (int l = N - 1; l >= k; --l) {
            const Matrix& P1 = tb.P(k, l + 1);
            const Matrix& Pc1 = tb.Pcal(k, l + 1);
            const Matrix& T1 = tb.T(k, l + 1);
            const Matrix& Tc1 = tb.Tcal(k, l + 1);
            const Vector& pi1 = tb.pi(k, l + 1);

            if (l == k) {
                const Matrix Bcal = p.B_cal(k, k);
                const Matrix Dcal = p.D_cal(k, k);
                const Matrix S1 = Pc1 + Tc1;
                const Matrix S2 = P1 + T1;
                Matrix W = p.R_cal(k, k);
                if (options.control_regularization != 0.0) {
                    W += options.control_regularization * Matrix::Identity(p.m, p.m);
                }
                W += Bcal.transpose() * S1 * Bcal + Dcal.transpose() * S2 * Dcal;
                Matrix H = Bcal.transpose() * S1 * p.A_cal(k, k) + Dcal.transpose() * S2 * p.C_cal(k, k);
                Vector beta = Bcal.transpose() * (S1 * p.f(k, k) + pi1) +
                              Dcal.transpose() * (S2 * p.d(k, k)) + p.rho(k, k);
                store(gains, k, finish_gains(std::move(W), std::move(H), std::move(beta)));
            }

            const auto li = static_cast<std::size_t>(l);
            const Matrix K = -gains.Psi[li];
            const Vector a = -gains.alpha[li];

            const Matrix& A = p.A(k, l);
            const Matrix& B = p.B(k, l);
            const Matrix& C = p.C(k, l);
            const Matrix& D = p.D(k, l);
            const Matrix Acal = p.A_cal(k, l);
            const Matrix Bcal = p.B_cal(k, l);
            const Matrix Ccal = p.C_cal(k, l);
            const Matrix Dcal = p.D_cal(k, l);
            const Matrix All = p.A_cal(l, l);
            const Matrix Bll = p.B_cal(l, l);
            const Matrix Cll = p.C_cal(l, l);
            const Matrix Dll = p.D_cal(l, l);

            tb.T(k, l) = A.transpose() * T1 * All + C.transpose() * T1 * Cll -
                         (A.transpose() * P1 * B + A.transpose() * T1 * Bll +
                          C.transpose() * P1 * D + C.transpose() * T1 * Dll) *
                             K;
            tb.Tcal(k, l) = Acal.transpose() * Tc1 * All + Ccal.transpose() * T1 * Cll -
                            (Acal.transpose() * Pc1 * Bcal + Acal.transpose() * Tc1 * Bll +
                             Ccal.transpose() * P1 * Dcal + Ccal.transpose() * T1 * Dll) *
                                K;
            tb.pi(k, l) = Acal.transpose() * Pc1 * (p.f(k, l) - Bcal * a) +
                          Acal.transpose() * Tc1 * (p.f(l, l) - Bll * a) +
                          Ccal.transpose() * P1 * (p.d(k, l) - Dcal * a) +
                          Ccal.transpose() * T1 * (p.d(l, l) - Dll * a) +
                          Acal.transpose() * pi1 + p.q(k, l);
        }
    }

    Solution s;
    s.convexity = convexity_margins(p, tb);
    s.report = make_report(gains, s.convexity, options.range_tolerance);
    s.tables = std::move(tables);
    s.gains = std::move(gains);
    return s;
}

Solution solve(const ProblemData& p, const SolveOptions& options) {
    return solve_gdre_global(p, solve_symmetric(p), options);
}

Solution solve_epsilon(const ProblemData& p, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw Error(ErrorKind::EpsilonNonPositive, "epsilon must be positive");
    }
    SolveOptions o;
    o.control_regularization = epsilon;
    return solve(p, o);
}

double gain_distance(const GainSchedule& a, const GainSchedule& b) {
    if (a.horizon() != b.horizon()) {
        throw Error(ErrorKind::HorizonMismatch, "gain schedules cover different horizons");
    }
    double d = 0.0;
    for (std::size_t k = 0; k < a.Psi.size(); ++k) {
        d = std::max(d, (a.Psi[k] - b.Psi[k]).norm() + (a.alpha[k] - b.alpha[k]).norm());
    }
    return d;
}

double gain_norm(const GainSchedule& g) {
    double v = 0.0;
    for (std::size_t k = 0; k < g.Psi.size(); ++k) {
        v = std::max(v, g.Psi[k].norm() + g.alpha[k].norm());
    }
    return v;
}

FeedbackTables feedback_tables(const ProblemData& p, const RecursionTables& sym,
                              const std::vector<Matrix>& psi, const std::vector<Vector>& alpha,
                              int k) {
    const int N = p.N;
    if (k < 0 || k >= N) {
        throw Error(ErrorKind::HorizonMismatch, "start index outside the horizon");
    }
    if (psi.size() != static_cast<std::size_t>(N) || alpha.size() != static_cast<std::size_t>(N)) {
        throw Error(ErrorKind::DimensionMismatch, "feedback must list one entry per step");
    }
    for (int l = k; l < N; ++l) {
        const auto li = static_cast<std::size_t>(l);
        if (psi[li].rows() != p.m || psi[li].cols() != p.n || alpha[li].size() != p.m) {
            throw Error(ErrorKind::DimensionMismatch,
                        "feedback at step " + std::to_string(l) + " has the wrong shape");
        }
    }

    const auto len = static_cast<std::size_t>(N - k + 1);
    FeedbackTables out;
    out.k = k;
    out.T.assign(len, Matrix::Zero(p.n, p.n));
    out.Tbar.assign(len, Matrix::Zero(p.n, p.n));
    out.Tcal.assign(len, Matrix::Zero(p.n, p.n));
    out.pi.assign(len, Vector());
    out.pi[len - 1] = p.g_at(k);

    for (int l = N - 1; l >= k; --l) {
        const auto i = static_cast<std::size_t>(l - k);
        const auto li = static_cast<std::size_t>(l);
        const Matrix& Psi = psi[li];
        const Vector& al = alpha[li];

        const Matrix& P1 = sym.P(k, l + 1);
        const Matrix& Pc1 = sym.Pcal(k, l + 1);
        const Matrix Pb1 = sym.Pbar(k, l + 1);
        const Matrix& T1 = out.T[i + 1];
        const Matrix& Tb1 = out.Tbar[i + 1];
        const Matrix& Tc1 = out.Tcal[i + 1];

        const Matrix At = p.A(k, l).transpose();
        const Matrix Abt = p.Abar(k, l).transpose();
        const Matrix Ct = p.C(k, l).transpose();
        const Matrix Cbt = p.Cbar(k, l).transpose();
        const Matrix Acalt = p.A_cal(k, l).transpose();
        const Matrix Ccalt = p.C_cal(k, l).transpose();
        const Matrix& B = p.B(k, l);
        const Matrix& Bb = p.Bbar(k, l);
        const Matrix& D = p.D(k, l);
        const Matrix& Db = p.Dbar(k, l);
        const Matrix Bcal = p.B_cal(k, l);
        const Matrix Dcal = p.D_cal(k, l);
        const Matrix All = p.A_cal(l, l);
        const Matrix Bll = p.B_cal(l, l);
        const Matrix Cll = p.C_cal(l, l);
        const Matrix Dll = p.D_cal(l, l);

        out.T[i] = At * T1 * All + Ct * T1 * Cll +
                   (At * P1 * B + At * T1 * Bll + Ct * P1 * D + Ct * T1 * Dll) * Psi;
        out.Tbar[i] = At * Tb1 * All + Abt * Tc1 * All + Cbt * T1 * Cll +
                      (At * P1 * Bb + At * Pb1 * Bcal + At * Tb1 * Bll + Ct * P1 * Db +
                       Abt * Pc1 * Bcal + Abt * Tc1 * Bll + Cbt * P1 * Dcal + Cbt * T1 * Dll) *
                          Psi;
        out.Tcal[i] = out.T[i] + out.Tbar[i];
        out.pi[i] = Acalt * Pc1 * (Bcal * al + p.f(k, l)) + Acalt * Tc1 * (Bll * al + p.f(l, l)) +
                    Acalt * out.pi[i + 1] + Ccalt * P1 * (Dcal * al + p.d(k, l)) +
                    Ccalt * T1 * (Dll * al + p.d(l, l)) + p.q(k, l);
    }
    return out;
}

Solution solve_no_meanfield(const PlainData& s, const SolveOptions& options) {
    const int N = s.N;
    RecursionTables tb;
    tb.P = Family<Matrix>(N, N);
    tb.T = Family<Matrix>(N, N);
    tb.pi = Family<Vector>(N, N);
    GainSchedule gains = empty_schedule(N);
    ConvexityResult conv;
    conv.M2.resize(static_cast<std::size_t>(N));
    conv.verdicts.resize(static_cast<std::size_t>(N));

    for (int k = 0; k < N; ++k) {
        const auto ki = static_cast<std::size_t>(k);
        tb.P(k, N) = s.G[ki];
        for (int l = N - 1; l >= k; --l) {
            const Matrix& P1 = tb.P(k, l + 1);
            tb.P(k, l) = symmetrize(s.Q(k, l) + s.A(k, l).transpose() * P1 * s.A(k, l) +
                                    s.C(k, l).transpose() * P1 * s.C(k, l));
        }
    }

    for (int k = N - 1; k >= 0; --k) {
        const auto ki = static_cast<std::size_t>(k);
        tb.T(k, N) = Matrix::Zero(s.n, s.n);
        tb.pi(k, N) = s.g[ki];
        for (int l = N - 1; l >= k; --l) {
            const Matrix& P1 = tb.P(k, l + 1);
            const Matrix& T1 = tb.T(k, l + 1);
            const Vector& pi1 = tb.pi(k, l + 1);
            if (l == k) {
                const Matrix& B = s.B(k, k);
                const Matrix& D = s.D(k, k);
                const Matrix S = P1 + T1;
                Matrix W = s.R(k, k);
                if (options.control_regularization != 0.0) {
                    W += options.control_regularization * Matrix::Identity(s.m, s.m);
                }
                W += B.transpose() * S * B + D.transpose() * S * D;
                Matrix H = B.transpose() * S * s.A(k, k) + D.transpose() * S * s.C(k, k);
                Vector beta = B.transpose() * (S * s.f(k, k) + pi1) + D.transpose() * (S * s.d(k, k)) +
                              s.rho(k, k);
                store(gains, k, finish_gains(std::move(W), std::move(H), std::move(beta)));
                conv.M2[ki] = s.R(k, k) + B.transpose() * P1 * B + D.transpose() * P1 * D;
                conv.verdicts[ki] = psd_check(conv.M2[ki]);
            }
            const auto li = static_cast<std::size_t>(l);
            const Matrix K = -gains.Psi[li];
            const Vector a = -gains.alpha[li];
            const Matrix At = s.A(k, l).transpose();
            const Matrix Ct = s.C(k, l).transpose();
            const Matrix& Bkl = s.B(k, l);
            const Matrix& Dkl = s.D(k, l);
            const Matrix& Bll = s.B(l, l);
            const Matrix& Dll = s.D(l, l);

            tb.T(k, l) = At * T1 * s.A(l, l) + Ct * T1 * s.C(l, l) -
                         (At * P1 * Bkl + At * T1 * Bll + Ct * P1 * Dkl + Ct * T1 * Dll) * K;
            tb.pi(k, l) = At * P1 * (s.f(k, l) - Bkl * a) + At * T1 * (s.f(l, l) - Bll * a) +
                          Ct * P1 * (s.d(k, l) - Dkl * a) + Ct * T1 * (s.d(l, l) - Dll * a) +
                          At * pi1 + s.q(k, l);
        }
    }

    tb.Pcal = tb.P;
    tb.Tcal = tb.T;
    Solution out;
    out.report = make_report(gains, conv, options.range_tolerance);
    out.convexity = std::move(conv);
    out.tables = std::move(tb);
    out.gains = std::move(gains);
    return out;
}

StageTables solve_time_invariant(const StageData& s) {
    const int N = s.N;
    const auto len = static_cast<std::size_t>(N + 1);
    StageTables out;
    out.P.resize(len);
    out.Pcal.resize(len);
    out.T.resize(len);
    out.Tcal.resize(len);
    out.pi.resize(len);
    out.gains = empty_schedule(N);

    out.P[len - 1] = s.G;
    out.Pcal[len - 1] = s.G + s.Gbar;
    out.T[len - 1] = Matrix::Zero(s.n, s.n);
    out.Tcal[len - 1] = Matrix::Zero(s.n, s.n);
    out.pi[len - 1] = s.g;

    for (int l = N - 1; l >= 0; --l) {
        const auto i = static_cast<std::size_t>(l);
        const Matrix& P1 = out.P[i + 1];
        const Matrix& Pc1 = out.Pcal[i + 1];
        const Matrix& T1 = out.T[i + 1];
        const Matrix& Tc1 = out.Tcal[i + 1];
        const Vector& pi1 = out.pi[i + 1];

        const Matrix& A = s.A[i];
        const Matrix& B = s.B[i];
        const Matrix& C = s.C[i];
        const Matrix& D = s.D[i];
        const Matrix Acal = s.A[i] + s.Abar[i];
        const Matrix Bcal = s.B[i] + s.Bbar[i];
        const Matrix Ccal = s.C[i] + s.Cbar[i];
        const Matrix Dcal = s.D[i] + s.Dbar[i];

        const Matrix S1 = Pc1 + Tc1;
        const Matrix S2 = P1 + T1;
        Matrix W = s.R[i] + s.Rbar[i];
        W += Bcal.transpose() * S1 * Bcal + Dcal.transpose() * S2 * Dcal;
        Matrix H = Bcal.transpose() * S1 * Acal + Dcal.transpose() * S2 * Ccal;
        Vector beta = Bcal.transpose() * (S1 * s.f[i] + pi1) + Dcal.transpose() * (S2 * s.d[i]) + s.rho[i];
        store(out.gains, l, finish_gains(std::move(W), std::move(H), std::move(beta)));
        const Matrix K = -out.gains.Psi[i];
        const Vector a = -out.gains.alpha[i];

        out.P[i] = symmetrize(s.Q[i] + A.transpose() * P1 * A + C.transpose() * P1 * C);
        out.Pcal[i] = symmetrize(s.Q[i] + s.Qbar[i] + Acal.transpose() * Pc1 * Acal +
                                 Ccal.transpose() * P1 * Ccal);
        out.T[i] = A.transpose() * T1 * Acal + C.transpose() * T1 * Ccal -
                   (A.transpose() * P1 * B + A.transpose() * T1 * Bcal + C.transpose() * P1 * D +
                    C.transpose() * T1 * Dcal) *
                       K;
        out.Tcal[i] = Acal.transpose() * Tc1 * Acal + Ccal.transpose() * T1 * Ccal -
                      (Acal.transpose() * Pc1 * Bcal + Acal.transpose() * Tc1 * Bcal +
                       Ccal.transpose() * P1 * Dcal + Ccal.transpose() * T1 * Dcal) *
                          K;
        out.pi[i] = Acal.transpose() * Pc1 * (s.f[i] - Bcal * a) + Acal.transpose() * Tc1 * (s.f[i] - Bcal * a) +
                    Ccal.transpose() * P1 * (s.d[i] - Dcal * a) + Ccal.transpose() * T1 * (s.d[i] - Dcal * a) +
                    Acal.transpose() * pi1 + s.q[i];
    }
    return out;
}

}  // namespace mflq
