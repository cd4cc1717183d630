#include "mflq/error.hpp"
#include "mflq/recursion.hpp"
#include "support/instances.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mflq;
using mflq::testing::InstanceShape;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / (1.0 + b.norm()); }

ProblemData scalar(int N) { return ProblemData::zeros(1, 1, N); }

}  // namespace

TEST(SolveSymmetric, IdentityDynamicsKeepTerminalWeight) {
    ProblemData p = ProblemData::zeros(2, 1, 4);
    for (int t = 0; t < p.N; ++t) {
        for (int k = t; k < p.N; ++k) {
            p.A(t, k) = Matrix::Identity(2, 2);
        }
        p.G[static_cast<std::size_t>(t)] = Matrix::Identity(2, 2);
    }
    const RecursionTables tb = solve_symmetric(p);
    for (int k = 0; k < p.N; ++k) {
        for (int l = k; l <= p.N; ++l) {
            EXPECT_EQ(tb.P(k, l), Matrix::Identity(2, 2));
            EXPECT_EQ(tb.Pcal(k, l), Matrix::Identity(2, 2));
        }
    }
}

TEST(SolveSymmetric, ScalarHandRollout) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal;
    ProblemData p = scalar(3);
    for (int t = 0; t < 3; ++t) {
        for (int k = t; k < 3; ++k) {
            for (auto* fam : {&p.A, &p.Abar, &p.C, &p.Cbar, &p.Q, &p.Qbar}) {
                (*fam)(t, k)(0, 0) = normal(rng);
            }
        }
        p.G[static_cast<std::size_t>(t)](0, 0) = normal(rng);
        p.Gbar[static_cast<std::size_t>(t)](0, 0) = normal(rng);
    }
    const RecursionTables tb = solve_symmetric(p);
    for (int k = 0; k < 3; ++k) {
        double P = p.G_at(k)(0, 0);
        double Pc = P + p.Gbar_at(k)(0, 0);
        for (int l = 2; l >= k; --l) {
            const double a = p.A(k, l)(0, 0), c = p.C(k, l)(0, 0);
            const double ac = a + p.Abar(k, l)(0, 0), cc = c + p.Cbar(k, l)(0, 0);
            const double q = p.Q(k, l)(0, 0), qc = q + p.Qbar(k, l)(0, 0);
            const double P_next = P;
            P = q + a * a * P_next + c * c * P_next;
            Pc = qc + ac * ac * Pc + cc * cc * P_next;
            EXPECT_NEAR(tb.P(k, l)(0, 0), P, 1e-12 * (1.0 + std::abs(P)));
            EXPECT_NEAR(tb.Pcal(k, l)(0, 0), Pc, 1e-12 * (1.0 + std::abs(Pc)));
        }
    }
}

TEST(SolveSymmetric, TerminalColumnAndSymmetry) {
    std::mt19937_64 rng(32);
    const ProblemData p = mflq::testing::convex_instance(rng, {3, 2, 5});
    const Solution s = solve(p);
    for (int k = 0; k < p.N; ++k) {
        EXPECT_EQ(s.tables.P(k, p.N), p.G_at(k));
        EXPECT_EQ(s.tables.Pcal(k, p.N), p.G_cal(k));
        EXPECT_EQ(s.tables.T(k, p.N).norm(), 0.0);
        EXPECT_EQ(s.tables.Tcal(k, p.N).norm(), 0.0);
        EXPECT_EQ(s.tables.pi(k, p.N), p.g_at(k));
        for (int l = k; l <= p.N; ++l) {
            EXPECT_LE((s.tables.P(k, l) - s.tables.P(k, l).transpose()).norm(), 1e-10);
            EXPECT_LE((s.tables.Pcal(k, l) - s.tables.Pcal(k, l).transpose()).norm(), 1e-10);
        }
    }
}

TEST(ConvexityMargins, LastStepMatrixOfFixture) {
    const ProblemData p = two_step_example();
    const ConvexityResult c = convexity_margins(p, solve_symmetric(p));
    const Matrix expected = m2(400.8004, -330.6524, -330.6524, 673.2241);
    EXPECT_LE((c.M2[1] - expected).cwiseAbs().maxCoeff(), 1e-3);
    EXPECT_TRUE(c.verdicts[1].is_psd);
}

TEST(ConvexityMargins, DecoupledControlGivesIdentity) {
    ProblemData p = ProblemData::zeros(2, 2, 3);
    for (int t = 0; t < 3; ++t) {
        for (int k = t; k < 3; ++k) {
            p.R(t, k) = Matrix::Identity(2, 2);
        }
    }
    const ConvexityResult c = convexity_margins(p, solve_symmetric(p));
    for (const auto& v : c.verdicts) {
        EXPECT_NEAR(v.min_eigenvalue, 1.0, 1e-15);
        EXPECT_TRUE(v.is_psd);
    }
}

TEST(ConvexityMargins, NegativeControlWeight) {
    ProblemData p = ProblemData::zeros(2, 2, 2);
    p.R(0, 0) = -Matrix::Identity(2, 2);
    const ConvexityResult c = convexity_margins(p, solve_symmetric(p));
    EXPECT_NEAR(c.verdicts[0].min_eigenvalue, -1.0, 1e-15);
    EXPECT_FALSE(c.verdicts[0].is_psd);
}

TEST(SolveGdreGlobal, LastStepGainsOfFixture) {
    const Solution s = solve(two_step_example());
    const Matrix K1 = s.gains.Wdag[1] * s.gains.H[1];
    const Vector a1 = s.gains.Wdag[1] * s.gains.beta[1];
    EXPECT_LE((K1 - m2(1.1320, 0.1179, 0.0254, 1.0388)).cwiseAbs().maxCoeff(), 1e-3);
    EXPECT_NEAR(a1(0), -0.3381, 1e-3);
    EXPECT_NEAR(a1(1), 0.1433, 1e-3);
    const Vector eig = symmetric_eigenvalues(s.gains.W[1]);
    EXPECT_NEAR(eig(0), 179.4026, 1e-2);
    EXPECT_NEAR(eig(1), 894.6219, 1e-2);
    for (int k = 0; k < 2; ++k) {
        EXPECT_LE(s.report.rangeH_residuals[k], 1e-12);
        EXPECT_LE(s.report.rangeBeta_residuals[k], 1e-12);
    }
}

TEST(SolveGdreGlobal, GainsAreExactlyNegatedPseudoinverseProducts) {
    std::mt19937_64 rng(33);
    const ProblemData p = mflq::testing::convex_instance(rng, {3, 2, 4});
    const Solution s = solve(p);
    for (int k = 0; k < p.N; ++k) {
        const auto i = static_cast<std::size_t>(k);
        EXPECT_EQ(s.gains.Psi[i], Matrix(-(s.gains.Wdag[i] * s.gains.H[i])));
        EXPECT_EQ(s.gains.alpha[i], Vector(-(s.gains.Wdag[i] * s.gains.beta[i])));
        EXPECT_LE(penrose_residuals(s.gains.W[i], s.gains.Wdag[i]).max(), 1e-10 * (1.0 + s.gains.W[i].norm()));
    }
}

TEST(SolveGdreGlobal, HomogeneousDataGiveZeroOffsets) {
    std::mt19937_64 rng(34);
    InstanceShape shape{2, 2, 4};
    shape.affine = false;
    const ProblemData p = mflq::testing::convex_instance(rng, shape);
    const Solution s = solve(p);
    for (int k = 0; k < p.N; ++k) {
        EXPECT_EQ(s.gains.beta[static_cast<std::size_t>(k)].norm(), 0.0);
        for (int l = k; l <= p.N; ++l) {
            EXPECT_EQ(s.tables.pi(k, l).norm(), 0.0);
        }
    }
}

TEST(SolveGdreGlobal, SingleStepHandAssembly) {
    std::mt19937_64 rng(35);
    const ProblemData p = mflq::testing::convex_instance(rng, {3, 2, 1});
    const Solution s = solve(p);
    const Matrix Bc = p.B_cal(0, 0), Dc = p.D_cal(0, 0);
    const Matrix W = p.R_cal(0, 0) + Bc.transpose() * p.G_cal(0) * Bc + Dc.transpose() * p.G_at(0) * Dc;
    const Matrix H = Bc.transpose() * p.G_cal(0) * p.A_cal(0, 0) + Dc.transpose() * p.G_at(0) * p.C_cal(0, 0);
    const Vector beta = Bc.transpose() * (p.G_cal(0) * p.f(0, 0) + p.g_at(0)) +
                        Dc.transpose() * p.G_at(0) * p.d(0, 0) + p.rho(0, 0);
    EXPECT_LE(rel(s.gains.W[0], W), 1e-13);
    EXPECT_LE(rel(s.gains.H[0], H), 1e-13);
    EXPECT_LE(rel(s.gains.beta[0], beta), 1e-13);
}

TEST(SolveGdreGlobal, ZeroControlWeightAndInputsGiveZeroGains) {
    std::mt19937_64 rng(36);
    ProblemData p = mflq::testing::convex_instance(rng, {2, 2, 3});
    for (int t = 0; t < p.N; ++t) {
        for (int k = t; k < p.N; ++k) {
            p.B(t, k).setZero();
            p.Bbar(t, k).setZero();
            p.D(t, k).setZero();
            p.Dbar(t, k).setZero();
            p.R(t, k).setZero();
            p.Rbar(t, k).setZero();
            p.rho(t, k).setZero();
        }
    }
    const Solution s = solve(p);
    for (int k = 0; k < p.N; ++k) {
        EXPECT_EQ(s.gains.Psi[static_cast<std::size_t>(k)].norm(), 0.0);
        EXPECT_EQ(s.gains.alpha[static_cast<std::size_t>(k)].norm(), 0.0);
        EXPECT_EQ(s.report.rangeH_residuals[static_cast<std::size_t>(k)], 0.0);
    }
    EXPECT_TRUE(s.report.verdict_all_pairs);
}

TEST(SolveGdreGlobal, RangeViolationFlipsVerdict) {
    ProblemData p = ProblemData::zeros(1, 1, 1);
    p.A(0, 0)(0, 0) = 1.0;
    p.rho(0, 0)(0) = 1.0;  // W = 0 but β ≠ 0
    p.G[0](0, 0) = 1.0;
    const Solution s = solve(p);
    EXPECT_EQ(s.gains.Wdag[0](0, 0), 0.0);
    EXPECT_GT(s.report.rangeBeta_residuals[0], 0.1);
    EXPECT_FALSE(s.report.verdict_all_pairs);
}

TEST(SolveGdreGlobal, ScaleEquivariance) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        const ProblemData p = mflq::testing::convex_instance(rng, {3, 2, 4});
        ProblemData scaled = p;
        const double c = 7.5;
        for (auto* fam : {&scaled.Q, &scaled.Qbar, &scaled.R, &scaled.Rbar}) {
            for (auto& m : *fam) m *= c;
        }
        for (auto* fam : {&scaled.q, &scaled.rho}) {
            for (auto& v : *fam) v *= c;
        }
        for (auto* terms : {&scaled.G, &scaled.Gbar}) {
            for (auto& m : *terms) m *= c;
        }
        for (auto& v : scaled.g) v *= c;
        const Solution a = solve(p), b = solve(scaled);
        for (std::size_t k = 0; k < a.gains.W.size(); ++k) {
            EXPECT_LE(rel(b.gains.W[k], c * a.gains.W[k]), 1e-9);
            EXPECT_LE(rel(b.gains.H[k], c * a.gains.H[k]), 1e-9);
            EXPECT_LE(rel(b.gains.Psi[k], a.gains.Psi[k]), 1e-9);
            EXPECT_LE(rel(b.gains.alpha[k], a.gains.alpha[k]), 1e-9);
        }
    }
}

TEST(SolveEpsilon, ZeroRegularizationIsBitIdentical) {
    std::mt19937_64 rng(38);
    const ProblemData p = mflq::testing::convex_instance(rng, {3, 2, 4});
    SolveOptions o;
    o.control_regularization = 0.0;
    const Solution a = solve(p), b = solve(p, o);
    for (std::size_t k = 0; k < a.gains.W.size(); ++k) {
        EXPECT_EQ(a.gains.W[k], b.gains.W[k]);
        EXPECT_EQ(a.gains.Psi[k], b.gains.Psi[k]);
        EXPECT_EQ(a.gains.alpha[k], b.gains.alpha[k]);
    }
}

TEST(SolveEpsilon, RejectsNonPositive) {
    const ProblemData p = two_step_example();
    for (double e : {0.0, -1e-3, std::numeric_limits<double>::quiet_NaN()}) {
        try {
            solve_epsilon(p, e);
            FAIL() << e;
        } catch (const Error& err) {
            EXPECT_EQ(err.kind(), ErrorKind::EpsilonNonPositive);
        }
    }
}

TEST(SolveEpsilon, SmallEpsilonIsCloseToUnperturbed) {
    const ProblemData p = two_step_example();
    const Solution base = solve(p);
    EXPECT_LE(gain_distance(solve_epsilon(p, 1e-6).gains, base.gains), 1e-4);
}

TEST(SolveEpsilon, DistanceShrinksWithEpsilon) {
    const ProblemData p = two_step_example();
    const Solution base = solve(p);
    double previous = std::numeric_limits<double>::infinity();
    for (double e : {1e-2, 1e-4, 1e-6}) {
        const double d = gain_distance(solve_epsilon(p, e).gains, base.gains);
        EXPECT_LT(d, previous);
        previous = d;
    }
}

TEST(SolveEpsilon, DecoupledControlGivesMinusRho) {
    std::mt19937_64 rng(39);
    ProblemData p = mflq::testing::convex_instance(rng, {2, 2, 3});
    for (int t = 0; t < p.N; ++t) {
        for (int k = t; k < p.N; ++k) {
            for (auto* fam : {&p.B, &p.Bbar, &p.D, &p.Dbar, &p.R, &p.Rbar}) {
                (*fam)(t, k).setZero();
            }
        }
    }
    const Solution s = solve_epsilon(p, 1.0);
    for (int k = 0; k < p.N; ++k) {
        const auto i = static_cast<std::size_t>(k);
        EXPECT_EQ(s.gains.W[i], Matrix::Identity(2, 2));
        EXPECT_EQ(s.gains.Psi[i].norm(), 0.0);
        EXPECT_LE((s.gains.alpha[i] + p.rho(k, k)).norm(), 1e-15);
    }
}

TEST(FeedbackRecursion, AgreeWithGlobalSolveUnderItsGains) {
    std::mt19937_64 rng(40);
    for (int trial = 0; trial < 10; ++trial) {
        const ProblemData p = mflq::testing::convex_instance(rng, {3, 2, 4});
        const Solution s = solve(p);
        for (int k = 0; k < p.N; ++k) {
            const FeedbackTables ft = feedback_tables(p, s.tables, s.gains.Psi, s.gains.alpha, k);
            for (int l = k; l <= p.N; ++l) {
                const auto i = static_cast<std::size_t>(l - k);
                EXPECT_LE(rel(ft.T[i], s.tables.T(k, l)), 1e-10);
                EXPECT_LE(rel(ft.Tcal[i], s.tables.Tcal(k, l)), 1e-10);
                EXPECT_LE(rel(ft.Tbar[i], s.tables.Tbar(k, l)), 1e-10);
                EXPECT_LE(rel(ft.pi[i], s.tables.pi(k, l)), 1e-10);
            }
        }
    }
}

TEST(FeedbackRecursion, ZeroFeedbackAndHomogeneousDataVanish) {
    std::mt19937_64 rng(41);
    InstanceShape shape{2, 2, 3};
    shape.affine = false;
    const ProblemData p = mflq::testing::convex_instance(rng, shape);
    const std::vector<Matrix> psi(3, Matrix::Zero(2, 2));
    const std::vector<Vector> alpha(3, Vector::Zero(2));
    const FeedbackTables ft = feedback_tables(p, solve_symmetric(p), psi, alpha, 0);
    for (std::size_t i = 0; i < ft.T.size(); ++i) {
        EXPECT_EQ(ft.T[i].norm(), 0.0);
        EXPECT_EQ(ft.Tbar[i].norm(), 0.0);
        EXPECT_EQ(ft.pi[i].norm(), 0.0);
    }
}

TEST(FeedbackRecursion, ScalarTwoStepExpansion) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal;
    const ProblemData p = mflq::testing::convex_instance(rng, {1, 1, 2});
    const double psi0 = normal(rng), psi1 = normal(rng), al0 = normal(rng), al1 = normal(rng);
    const std::vector<Matrix> psi{Matrix::Constant(1, 1, psi0), Matrix::Constant(1, 1, psi1)};
    const std::vector<Vector> alpha{Vector::Constant(1, al0), Vector::Constant(1, al1)};
    const FeedbackTables ft = feedback_tables(p, solve_symmetric(p), psi, alpha, 0);

    const auto v = [](const Matrix& m) { return m(0, 0); };
    const auto w = [](const Vector& x) { return x(0); };
    // Symmetric part by hand.
    const double G = v(p.G_at(0)), Gc = v(p.G_cal(0));
    const double a1 = v(p.A(0, 1)), ab1 = v(p.Abar(0, 1)), c1 = v(p.C(0, 1)), cb1 = v(p.Cbar(0, 1));
    const double b1 = v(p.B(0, 1)), bb1 = v(p.Bbar(0, 1)), d1 = v(p.D(0, 1)), db1 = v(p.Dbar(0, 1));
    const double A1 = a1 + ab1, C1 = c1 + cb1, B1 = b1 + bb1, D1 = d1 + db1;
    const double P2 = G, Pc2 = Gc, Pb2 = Gc - G;
    const double P1 = v(p.Q(0, 1)) + a1 * a1 * P2 + c1 * c1 * P2;
    const double Pc1 = v(p.Q_cal(0, 1)) + A1 * A1 * Pc2 + C1 * C1 * P2;
    const double Pb1 = Pc1 - P1;
    const double A00 = v(p.A_cal(0, 0)), B00 = v(p.B_cal(0, 0)), C00 = v(p.C_cal(0, 0)), D00 = v(p.D_cal(0, 0));

    // ℓ = 1 (T', T̄' vanish at ℓ + 1 = N).
    const double T1 = (a1 * P2 * b1 + c1 * P2 * d1) * psi1;
    const double Tb1 = (a1 * P2 * bb1 + a1 * Pb2 * B1 + c1 * P2 * db1 + ab1 * Pc2 * B1 + cb1 * P2 * D1) * psi1;
    const double pi1 = A1 * Pc2 * (B1 * al1 + w(p.f(0, 1))) + A1 * w(p.g_at(0)) +
                       C1 * P2 * (D1 * al1 + w(p.d(0, 1))) + w(p.q(0, 1));
    // ℓ = 0.
    const double a0 = v(p.A(0, 0)), ab0 = v(p.Abar(0, 0)), c0 = v(p.C(0, 0)), cb0 = v(p.Cbar(0, 0));
    const double b0 = v(p.B(0, 0)), bb0 = v(p.Bbar(0, 0)), d0 = v(p.D(0, 0)), db0 = v(p.Dbar(0, 0));
    const double Tc1 = T1 + Tb1;
    const double T0 = a0 * T1 * A00 + c0 * T1 * C00 +
                      (a0 * P1 * b0 + a0 * T1 * B00 + c0 * P1 * d0 + c0 * T1 * D00) * psi0;
    const double Tb0 = a0 * Tb1 * A00 + ab0 * Tc1 * A00 + cb0 * T1 * C00 +
                       (a0 * P1 * bb0 + a0 * Pb1 * B00 + a0 * Tb1 * B00 + c0 * P1 * db0 + ab0 * Pc1 * B00 +
                        ab0 * Tc1 * B00 + cb0 * P1 * D00 + cb0 * T1 * D00) *
                           psi0;
    const double pi0 = A00 * Pc1 * (B00 * al0 + w(p.f(0, 0))) + A00 * Tc1 * (B00 * al0 + w(p.f(0, 0))) +
                       A00 * pi1 + C00 * P1 * (D00 * al0 + w(p.d(0, 0))) + C00 * T1 * (D00 * al0 + w(p.d(0, 0))) +
                       w(p.q(0, 0));
    EXPECT_NEAR(v(ft.T[1]), T1, 1e-12 * (1 + std::abs(T1)));
    EXPECT_NEAR(v(ft.Tbar[1]), Tb1, 1e-12 * (1 + std::abs(Tb1)));
    EXPECT_NEAR(w(ft.pi[1]), pi1, 1e-12 * (1 + std::abs(pi1)));
    EXPECT_NEAR(v(ft.T[0]), T0, 1e-12 * (1 + std::abs(T0)));
    EXPECT_NEAR(v(ft.Tbar[0]), Tb0, 1e-12 * (1 + std::abs(Tb0)));
    EXPECT_NEAR(w(ft.pi[0]), pi0, 1e-12 * (1 + std::abs(pi0)));
}

TEST(FeedbackRecursion, ShapeErrors) {
    const ProblemData p = two_step_example();
    const RecursionTables sym = solve_symmetric(p);
    std::vector<Matrix> psi(2, Matrix::Zero(2, 2));
    std::vector<Vector> alpha(2, Vector::Zero(2));
    psi[1] = Matrix::Zero(3, 2);
    EXPECT_THROW(feedback_tables(p, sym, psi, alpha, 0), Error);
    psi.pop_back();
    EXPECT_THROW(feedback_tables(p, sym, psi, alpha, 0), Error);
}

TEST(Reductions, NoMeanFieldPathMatchesGeneralSolver) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const InstanceShape shape{1 + trial % 3, 1 + trial % 2, 2 + trial % 4};
        const PlainData d = mflq::testing::plain_instance(rng, shape);
        const Solution general = solve(from_no_meanfield(d));
        const Solution dedicated = solve_no_meanfield(d);
        for (int k = 0; k < d.N; ++k) {
            for (int l = k; l <= d.N; ++l) {
                EXPECT_LE(rel(dedicated.tables.P(k, l), general.tables.P(k, l)), 1e-10);
                EXPECT_LE(rel(general.tables.Pcal(k, l), general.tables.P(k, l)), 1e-10);
                EXPECT_LE(rel(dedicated.tables.T(k, l), general.tables.T(k, l)), 1e-10);
                EXPECT_LE(rel(general.tables.Tcal(k, l), general.tables.T(k, l)), 1e-10);
                EXPECT_LE(rel(dedicated.tables.pi(k, l), general.tables.pi(k, l)), 1e-10);
            }
            const auto i = static_cast<std::size_t>(k);
            EXPECT_LE(rel(dedicated.gains.Psi[i], general.gains.Psi[i]), 1e-10);
            EXPECT_LE(rel(dedicated.gains.alpha[i], general.gains.alpha[i]), 1e-10);
        }
    }
}

TEST(Reductions, DroppingMeanFieldChangesFixtureGains) {
    const ProblemData full = two_step_example();
    PlainData d;
    d.n = full.n;
    d.m = full.m;
    d.N = full.N;
    d.A = full.A;
    d.B = full.B;
    d.C = full.C;
    d.D = full.D;
    d.f = full.f;
    d.d = full.d;
    d.Q = full.Q;
    d.R = full.R;
    d.q = full.q;
    d.rho = full.rho;
    d.G = full.G;
    d.g = full.g;
    EXPECT_GT(gain_distance(solve(full).gains, solve(from_no_meanfield(d)).gains), 0.01);
}

TEST(Reductions, TimeInvariantTablesDoNotDependOnStart) {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const StageData d = mflq::testing::stage_instance(rng, {2, 2, 5});
        const Solution general = solve(from_time_invariant(d));
        const StageTables single = solve_time_invariant(d);
        for (int k = 0; k < d.N; ++k) {
            for (int l = k; l <= d.N; ++l) {
                const auto i = static_cast<std::size_t>(l);
                EXPECT_LE(rel(general.tables.P(k, l), single.P[i]), 1e-10);
                EXPECT_LE(rel(general.tables.Pcal(k, l), single.Pcal[i]), 1e-10);
                EXPECT_LE(rel(general.tables.T(k, l), single.T[i]), 1e-10);
                EXPECT_LE(rel(general.tables.Tcal(k, l), single.Tcal[i]), 1e-10);
                EXPECT_LE(rel(general.tables.pi(k, l), single.pi[i]), 1e-10);
                EXPECT_LE(rel(general.tables.T(k, l), general.tables.T(l == d.N ? k : l, l)), 1e-10);
            }
            const auto i = static_cast<std::size_t>(k);
            EXPECT_LE(rel(general.gains.Psi[i], single.gains.Psi[i]), 1e-10);
        }
    }
}
