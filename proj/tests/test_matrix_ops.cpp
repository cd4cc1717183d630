#include "mflq/error.hpp"
#include "mflq/matrix_ops.hpp"
#include "support/instances.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

using namespace mflq;
using mflq::testing::gaussian;
using mflq::testing::rank_deficient;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST(Pinv, IdentityIsItsOwnInverse) {
    EXPECT_TRUE(pinv(Matrix::Identity(2, 2)).isApprox(Matrix::Identity(2, 2)));
}

TEST(Pinv, ZeroDiagonalEntryStaysZero) {
    const Matrix d = pinv(m2(2, 0, 0, 0));
    EXPECT_NEAR(d(0, 0), 0.5, 1e-15);
    EXPECT_EQ(d(0, 1), 0.0);
    EXPECT_EQ(d(1, 0), 0.0);
    EXPECT_EQ(d(1, 1), 0.0);
}

TEST(Pinv, ColumnOfOnes) {
    const Matrix col = Matrix::Ones(2, 1);
    const Matrix d = pinv(col);
    ASSERT_EQ(d.rows(), 1);
    ASSERT_EQ(d.cols(), 2);
    EXPECT_NEAR(d(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(d(0, 1), 0.5, 1e-15);
    EXPECT_LE(penrose_residuals(col, d).max(), 1e-14);
}

TEST(Pinv, RejectsNonFinite) {
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
        pinv(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    }
}

TEST(Pinv, ZeroMatrixGivesZero) {
    const Matrix d = pinv(Matrix::Zero(3, 2));
    EXPECT_EQ(d.rows(), 2);
    EXPECT_EQ(d.cols(), 3);
    EXPECT_EQ(d.norm(), 0.0);
}

TEST(Pinv, PenroseIdentitiesOnRandomAndRankDeficient) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(1, 8);
    for (int trial = 0; trial < 200; ++trial) {
        const int r = dim(rng), c = dim(rng);
        std::uniform_int_distribution<int> rk(0, std::min(r, c));
        const Matrix m = trial % 2 == 0 ? gaussian(rng, r, c, 1.0) : rank_deficient(rng, r, c, rk(rng));
        const Matrix d = pinv(m);
        EXPECT_LE(penrose_residuals(m, d).max(), 1e-10 * (1.0 + m.norm())) << "trial " << trial;
    }
}

TEST(Pinv, DoubleInverseRecoversMatrix) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dim(1, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix m = gaussian(rng, dim(rng), dim(rng), 1.0);
        EXPECT_LE((pinv(pinv(m)) - m).norm(), 1e-8 * (1.0 + m.norm()));
    }
}

TEST(SymmetricEigenvalues, MatchesSelfAdjointSolver) {
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 10; ++n) {
        const Matrix a = gaussian(rng, n, n, 1.0);
        const Matrix s = symmetrize(a);
        Eigen::SelfAdjointEigenSolver<Matrix> oracle(s);
        const Vector mine = symmetric_eigenvalues(s);
        EXPECT_LE((mine - oracle.eigenvalues()).norm(), 1e-10 * (1.0 + s.norm())) << "n=" << n;
    }
}

TEST(SymmetricEigenvalues, RejectsNonSquare) {
    EXPECT_THROW(symmetric_eigenvalues(Matrix::Zero(2, 3)), Error);
}

TEST(PsdCheck, Identity) {
    const PsdVerdict v = psd_check(Matrix::Identity(2, 2), 1e-9);
    EXPECT_TRUE(v.is_psd);
    EXPECT_NEAR(v.min_eigenvalue, 1.0, 1e-15);
    EXPECT_EQ(v.tolerance_used, 1e-9);
}

TEST(PsdCheck, IndefiniteControlWeight) {
    const PsdVerdict v = psd_check(m2(-0.5, 0, 0, 1), 1e-9);
    EXPECT_FALSE(v.is_psd);
    EXPECT_NEAR(v.min_eigenvalue, -0.5, 1e-15);
}

TEST(PsdCheck, DefaultToleranceScalesWithNorm) {
    const Matrix m = 100.0 * Matrix::Identity(3, 3);
    EXPECT_NEAR(psd_check(m).tolerance_used, 1e-9 * (1.0 + m.norm()), 1e-20);
}

TEST(PsdCheck, RejectsNonSquare) {
    try {
        psd_check(Matrix::Zero(2, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonSquare);
    }
}

TEST(PsdCheck, InvariantUnderSymmetricPermutation) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 5;
        const Matrix s = symmetrize(gaussian(rng, n, n, 1.0));
        Eigen::VectorXi idx = Eigen::VectorXi::LinSpaced(n, 0, n - 1);
        std::shuffle(idx.data(), idx.data() + n, rng);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(idx);
        const Matrix permuted = perm.transpose() * s * perm;
        EXPECT_NEAR(psd_check(s).min_eigenvalue, psd_check(permuted).min_eigenvalue, 1e-12 * (1.0 + s.norm()));
    }
}

TEST(RangeResidual, FullRankIsZero) {
    std::mt19937_64 rng(1);
    EXPECT_LE(range_residual(Matrix::Identity(3, 3), gaussian(rng, 3, 2, 1.0)), 1e-15);
}

TEST(RangeResidual, OutsideColumnSpace) {
    // ‖(0,1)‖ / (1 + ‖(0,1)‖) = 1/2.
    EXPECT_NEAR(range_residual(m2(1, 0, 0, 0), Vector::Unit(2, 1)), 0.5, 1e-15);
}

TEST(RangeResidual, InsideColumnSpace) {
    EXPECT_EQ(range_residual(m2(1, 0, 0, 0), Vector::Unit(2, 0)), 0.0);
}

TEST(RangeResidual, ConstructedFromColumnSpace) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 5;
        const Matrix w = rank_deficient(rng, n, n, 1 + trial % (n - 1));
        const Matrix v = w * gaussian(rng, n, 3, 1.0);
        EXPECT_LE(range_residual(w, v), 1e-10);
    }
}

TEST(RangeResidual, DimensionErrors) {
    EXPECT_THROW(range_residual(Matrix::Zero(2, 3), Matrix::Zero(2, 1)), Error);
    EXPECT_THROW(range_residual(Matrix::Zero(2, 2), Matrix::Zero(3, 1)), Error);
}

TEST(EigGeneral2x2, Diagonal) {
    const auto [a, b] = eig_general_2x2(m2(2, 0, 0, 3));
    EXPECT_NEAR(std::max(a.real(), b.real()), 3.0, 1e-15);
    EXPECT_NEAR(std::min(a.real(), b.real()), 2.0, 1e-15);
    EXPECT_EQ(a.imag(), 0.0);
}

TEST(EigGeneral2x2, PrintedNonsymmetricGainMatrix) {
    const auto [a, b] = eig_general_2x2(m2(12637, 932, -6334, 3464));
    const double hi = std::max(a.real(), b.real()), lo = std::min(a.real(), b.real());
    EXPECT_NEAR(hi, 11940.0, 0.01 * 11940.0);
    EXPECT_NEAR(lo, 4160.0, 0.01 * 4160.0);
}

TEST(EigGeneral2x2, Rotation) {
    const auto [a, b] = eig_general_2x2(m2(0, 1, -1, 0));
    EXPECT_NEAR(std::abs(a.imag()), 1.0, 1e-15);
    EXPECT_NEAR(a.imag(), -b.imag(), 1e-15);
    EXPECT_NEAR(a.real(), 0.0, 1e-15);
}

TEST(EigGeneral2x2, MatchesGeneralSolver) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix m = gaussian(rng, 2, 2, 1.0);
        Eigen::EigenSolver<Matrix> oracle(m);
        const auto [a, b] = eig_general_2x2(m);
        const auto e = oracle.eigenvalues();
        const double direct = std::abs(a - e(0)) + std::abs(b - e(1));
        const double swapped = std::abs(a - e(1)) + std::abs(b - e(0));
        EXPECT_LE(std::min(direct, swapped), 1e-12 * (1.0 + m.norm()));
    }
}

TEST(EigGeneral2x2, RejectsWrongShapeAndNaN) {
    EXPECT_THROW(eig_general_2x2(Matrix::Zero(3, 3)), Error);
    try {
        eig_general_2x2(m2(std::numeric_limits<double>::infinity(), 0, 0, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    }
}
