#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>

namespace mflq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Outcome of a positive-semidefiniteness test. `is_psd` holds exactly when
/// `min_eigenvalue >= -tolerance_used`.
struct PsdVerdict {
    bool is_psd = false;
    double min_eigenvalue = 0.0;
    double tolerance_used = 0.0;
};

/// Residuals of the four Penrose identities for a candidate pseudoinverse.
struct PenroseResiduals {
    double m_mdag_m = 0.0;     // ‖M M† M − M‖
    double mdag_m_mdag = 0.0;  // ‖M† M M† − M†‖
    double m_mdag_sym = 0.0;   // ‖(M M†)ᵀ − M M†‖
    double mdag_m_sym = 0.0;   // ‖(M† M)ᵀ − M† M‖

    double max() const;
};

/// Throws Error{NonFinite} if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// Moore–Penrose pseudoinverse through the singular value decomposition.
/// Singular values at or below max(rows, cols) · u · σ_max (u = unit
/// roundoff) are treated as zero.
Matrix pinv(const Matrix& m);

PenroseResiduals penrose_residuals(const Matrix& m, const Matrix& mdag);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. The input is symmetrized first. Sweeps stop once the
/// off-diagonal Frobenius norm is at most 1e-12 · ‖M‖_F.
Vector symmetric_eigenvalues(const Matrix& m);

/// Default PSD tolerance: 1e-9 · (1 + ‖M‖_F).
double default_psd_tolerance(const Matrix& m);

/// PSD test of (M + Mᵀ)/2. A negative `tol` selects default_psd_tolerance.
PsdVerdict psd_check(const Matrix& m, double tol = -1.0);

/// ‖(I − W W†) V‖_F / (1 + ‖V‖_F). Zero exactly when every column of V lies
/// in the range of W, i.e. W X = V is solvable.
double range_residual(const Matrix& w, const Matrix& v);

/// Both roots of the characteristic polynomial of a 2×2 matrix.
std::pair<std::complex<double>, std::complex<double>> eig_general_2x2(const Matrix& m);

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace mflq
