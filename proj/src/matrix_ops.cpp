#include "mflq/matrix_ops.hpp"

#include "mflq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mflq {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::HorizonMismatch: return "HorizonMismatch";
    case ErrorKind::EpsilonNonPositive: return "EpsilonNonPositive";
    case ErrorKind::EmptyConfig: return "EmptyConfig";
    case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

double PenroseResiduals::max() const {
    return std::max({m_mdag_m, mdag_m_mdag, m_mdag_sym, mdag_m_sym});
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::NonFinite, std::string(what) + " has a NaN or infinite entry");
    }
}

Matrix pinv(const Matrix& m) {
    require_finite(m, "pinv input");
    if (m.size() == 0) {
        return Matrix::Zero(m.cols(), m.rows());
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double unit_roundoff = std::numeric_limits<double>::epsilon() / 2.0;
    const double cutoff =
        static_cast<double>(std::max(m.rows(), m.cols())) * unit_roundoff * sigma(0);

    Vector inv_sigma = Vector::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cutoff) {
            inv_sigma(i) = 1.0 / sigma(i);
        }
    }
    return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

PenroseResiduals penrose_residuals(const Matrix& m, const Matrix& mdag) {
    const Matrix mmd = m * mdag;
    const Matrix mdm = mdag * m;
    PenroseResiduals r;
    r.m_mdag_m = (mmd * m - m).norm();
    r.mdag_m_mdag = (mdm * mdag - mdag).norm();
    r.m_mdag_sym = (mmd.transpose() - mmd).norm();
    r.mdag_m_sym = (mdm.transpose() - mdm).norm();
    return r;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j) {
                s += a(i, j) * a(i, j);
            }
        }
    }
    return std::sqrt(s);
}

}  // namespace

Vector symmetric_eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::NonSquare, "symmetric_eigenvalues needs a square matrix");
    }
    require_finite(m, "symmetric_eigenvalues input");
    Matrix a = symmetrize(m);
    const Eigen::Index n = a.rows();
    const double target = 1e-12 * a.norm();

    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_diagonal_norm(a) > target; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                // Rotation angle zeroing a(p,q); t is the smaller root of
                // t² + 2θt − 1 = 0.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vector eig = a.diagonal();
    std::sort(eig.begin(), eig.end());
    return eig;
}

double default_psd_tolerance(const Matrix& m) { return 1e-9 * (1.0 + m.norm()); }

PsdVerdict psd_check(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::NonSquare, "psd_check needs a square matrix");
    }
    PsdVerdict v;
    v.tolerance_used = tol < 0.0 ? default_psd_tolerance(m) : tol;
    v.min_eigenvalue = m.size() == 0 ? 0.0 : symmetric_eigenvalues(m)(0);
    v.is_psd = v.min_eigenvalue >= -v.tolerance_used;
    return v;
}

double range_residual(const Matrix& w, const Matrix& v) {
    if (w.rows() != w.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "range_residual: W must be square");
    }
    if (v.rows() != w.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "range_residual: V must have as many rows as W");
    }
    const Matrix projected = v - w * (pinv(w) * v);
    return projected.norm() / (1.0 + v.norm());
}

std::pair<std::complex<double>, std::complex<double>> eig_general_2x2(const Matrix& m) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw Error(ErrorKind::DimensionMismatch, "eig_general_2x2 needs a 2x2 matrix");
    }
    require_finite(m, "eig_general_2x2 input");
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double half_trace = 0.5 * (a + d);
    const double half_gap = 0.5 * (a - d);
    // ((a−d)/2)² + bc avoids the cancellation in tr²/4 − det.
    const double disc = half_gap * half_gap + b * c;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        const double big = half_trace + std::copysign(r, half_trace);
        const double det = a * d - b * c;
        const double small = big != 0.0 ? det / big : half_trace - std::copysign(r, half_trace);
        return {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
    }
    const double im = std::sqrt(-disc);
    return {std::complex<double>(half_trace, im), std::complex<double>(half_trace, -im)};
}

}  // namespace mflq
