#include "mflq/problem.hpp"

#include "mflq/error.hpp"

#include <cmath>
#include <initializer_list>
#include <sstream>

namespace mflq {

ProblemData ProblemData::zeros(int n, int m, int N) {
    if (n < 1 || m < 1 || N < 1) {
        throw Error(ErrorKind::DimensionMismatch, "n, m and N must all be positive");
    }
    ProblemData p;
    p.n = n;
    p.m = m;
    p.N = N;
    const Matrix nn = Matrix::Zero(n, n);
    const Matrix nm = Matrix::Zero(n, m);
    const Matrix mm = Matrix::Zero(m, m);
    const Vector vn = Vector::Zero(n);
    const Vector vm = Vector::Zero(m);
    for (auto* fam : {&p.A, &p.Abar, &p.C, &p.Cbar, &p.Q, &p.Qbar}) {
        *fam = Family<Matrix>(N, N - 1, nn);
    }
    for (auto* fam : {&p.B, &p.Bbar, &p.D, &p.Dbar}) {
        *fam = Family<Matrix>(N, N - 1, nm);
    }
    p.R = Family<Matrix>(N, N - 1, mm);
    p.Rbar = Family<Matrix>(N, N - 1, mm);
    for (auto* fam : {&p.f, &p.d, &p.q}) {
        *fam = Family<Vector>(N, N - 1, vn);
    }
    p.rho = Family<Vector>(N, N - 1, vm);
    p.G.assign(static_cast<std::size_t>(N), nn);
    p.Gbar.assign(static_cast<std::size_t>(N), nn);
    p.g.assign(static_cast<std::size_t>(N), vn);
    return p;
}

namespace {

std::string block_path(const char* name, int t, int k) {
    std::ostringstream os;
    os << name << '[' << t << "][" << k << ']';
    return os.str();
}

std::string terminal_path(const char* name, int t) {
    std::ostringstream os;
    os << name << '[' << t << ']';
    return os.str();
}

double asymmetry(const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

class Checker {
public:
    explicit Checker(std::vector<Finding>& out) : out_(out) {}

    void error(std::string path, std::string message) {
        out_.push_back({Severity::Error, std::move(path), std::move(message), 0.0});
    }

    // Returns true when the block is usable for further checks.
    bool block(const std::string& path, const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
        if (m.size() == 0) {
            error(path, "missing block");
            return false;
        }
        if (m.rows() != rows || m.cols() != cols) {
            std::ostringstream os;
            os << "expected " << rows << 'x' << cols << ", got " << m.rows() << 'x' << m.cols();
            error(path, os.str());
            return false;
        }
        if (!m.allFinite()) {
            error(path, "non-finite entry");
            return false;
        }
        return true;
    }

    bool block(const std::string& path, const Vector& v, Eigen::Index size) {
        if (v.size() == 0) {
            error(path, "missing block");
            return false;
        }
        if (v.size() != size) {
            std::ostringstream os;
            os << "expected length " << size << ", got " << v.size();
            error(path, os.str());
            return false;
        }
        if (!v.allFinite()) {
            error(path, "non-finite entry");
            return false;
        }
        return true;
    }

    void symmetric(const std::string& path, const Matrix& m) {
        const double defect = asymmetry(m);
        if (defect <= 1e-12) {
            return;
        }
        if (defect <= kSymmetryAutoFix) {
            out_.push_back({Severity::Warning, path, "asymmetric weight, symmetrized", defect});
        } else {
            out_.push_back({Severity::Error, path, "asymmetric weight", defect});
        }
    }

private:
    std::vector<Finding>& out_;
};

template <typename T>
bool family_shape_ok(Checker& c, const char* name, const Family<T>& fam, int N) {
    if (fam.rows() != N || fam.last() != N - 1) {
        c.error(name, "family does not cover the horizon");
        return false;
    }
    return true;
}

}  // namespace

std::vector<Finding> validate(const ProblemData& p) {
    std::vector<Finding> out;
    Checker c(out);
    if (p.n < 1 || p.m < 1 || p.N < 1) {
        c.error("shape", "n, m and N must all be positive");
        return out;
    }
    const int N = p.N;

    struct MatrixFamily {
        const char* name;
        const Family<Matrix>* fam;
        int rows, cols;
        bool symmetric;
    };
    const MatrixFamily matrices[] = {
        {"A", &p.A, p.n, p.n, false},     {"Abar", &p.Abar, p.n, p.n, false},
        {"B", &p.B, p.n, p.m, false},     {"Bbar", &p.Bbar, p.n, p.m, false},
        {"C", &p.C, p.n, p.n, false},     {"Cbar", &p.Cbar, p.n, p.n, false},
        {"D", &p.D, p.n, p.m, false},     {"Dbar", &p.Dbar, p.n, p.m, false},
        {"Q", &p.Q, p.n, p.n, true},      {"Qbar", &p.Qbar, p.n, p.n, true},
        {"R", &p.R, p.m, p.m, true},      {"Rbar", &p.Rbar, p.m, p.m, true},
    };
    for (const auto& mf : matrices) {
        if (!family_shape_ok(c, mf.name, *mf.fam, N)) {
            continue;
        }
        for (int t = 0; t < N; ++t) {
            for (int k = t; k < N; ++k) {
                const std::string path = block_path(mf.name, t, k);
                if (c.block(path, (*mf.fam)(t, k), mf.rows, mf.cols) && mf.symmetric) {
                    c.symmetric(path, (*mf.fam)(t, k));
                }
            }
        }
    }

    struct VectorFamily {
        const char* name;
        const Family<Vector>* fam;
        int size;
    };
    const VectorFamily vectors[] = {
        {"f", &p.f, p.n}, {"d", &p.d, p.n}, {"q", &p.q, p.n}, {"rho", &p.rho, p.m}};
    for (const auto& vf : vectors) {
        if (!family_shape_ok(c, vf.name, *vf.fam, N)) {
            continue;
        }
        for (int t = 0; t < N; ++t) {
            for (int k = t; k < N; ++k) {
                c.block(block_path(vf.name, t, k), (*vf.fam)(t, k), vf.size);
            }
        }
    }

    const auto terminal_count = static_cast<std::size_t>(N);
    if (p.G.size() != terminal_count || p.Gbar.size() != terminal_count ||
        p.g.size() != terminal_count) {
        c.error("terminal", "terminal data must have one entry per initial time");
        return out;
    }
    for (int t = 0; t < N; ++t) {
        const auto i = static_cast<std::size_t>(t);
        if (c.block(terminal_path("G", t), p.G[i], p.n, p.n)) {
            c.symmetric(terminal_path("G", t), p.G[i]);
        }
        if (c.block(terminal_path("Gbar", t), p.Gbar[i], p.n, p.n)) {
            c.symmetric(terminal_path("Gbar", t), p.Gbar[i]);
        }
        c.block(terminal_path("g", t), p.g[i], p.n);
    }
    return out;
}

void symmetrize_weights(ProblemData& p) {
    for (auto* fam : {&p.Q, &p.Qbar, &p.R, &p.Rbar}) {
        for (auto& m : *fam) {
            if (m.size() > 0 && m.rows() == m.cols()) {
                m = symmetrize(m);
            }
        }
    }
    for (auto* terms : {&p.G, &p.Gbar}) {
        for (auto& m : *terms) {
            if (m.size() > 0 && m.rows() == m.cols()) {
                m = symmetrize(m);
            }
        }
    }
}

bool has_errors(const std::vector<Finding>& findings) {
    for (const auto& f : findings) {
        if (f.severity == Severity::Error) {
            return true;
        }
    }
    return false;
}

namespace {

void require_length(const char* name, std::size_t got, int N) {
    if (got != static_cast<std::size_t>(N)) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(name) + " must have one entry per step");
    }
}

void require_shape(const char* name, const Matrix& m, int rows, int cols) {
    if (m.rows() != rows || m.cols() != cols) {
        throw Error(ErrorKind::DimensionMismatch, std::string(name) + " has the wrong shape");
    }
}

void require_shape(const char* name, const Vector& v, int size) {
    if (v.size() != size) {
        throw Error(ErrorKind::DimensionMismatch, std::string(name) + " has the wrong length");
    }
}

}  // namespace

ProblemData from_time_invariant(const StageData& s) {
    ProblemData p = ProblemData::zeros(s.n, s.m, s.N);
    struct Broadcast {
        const char* name;
        const std::vector<Matrix>* src;
        Family<Matrix>* dst;
        int rows, cols;
    };
    const Broadcast mats[] = {
        {"A", &s.A, &p.A, s.n, s.n},       {"Abar", &s.Abar, &p.Abar, s.n, s.n},
        {"B", &s.B, &p.B, s.n, s.m},       {"Bbar", &s.Bbar, &p.Bbar, s.n, s.m},
        {"C", &s.C, &p.C, s.n, s.n},       {"Cbar", &s.Cbar, &p.Cbar, s.n, s.n},
        {"D", &s.D, &p.D, s.n, s.m},       {"Dbar", &s.Dbar, &p.Dbar, s.n, s.m},
        {"Q", &s.Q, &p.Q, s.n, s.n},       {"Qbar", &s.Qbar, &p.Qbar, s.n, s.n},
        {"R", &s.R, &p.R, s.m, s.m},       {"Rbar", &s.Rbar, &p.Rbar, s.m, s.m},
    };
    for (const auto& b : mats) {
        require_length(b.name, b.src->size(), s.N);
        for (int k = 0; k < s.N; ++k) {
            const Matrix& m = (*b.src)[static_cast<std::size_t>(k)];
            require_shape(b.name, m, b.rows, b.cols);
            for (int t = 0; t <= k; ++t) {
                (*b.dst)(t, k) = m;
            }
        }
    }
    struct BroadcastVec {
        const char* name;
        const std::vector<Vector>* src;
        Family<Vector>* dst;
        int size;
    };
    const BroadcastVec vecs[] = {
        {"f", &s.f, &p.f, s.n}, {"d", &s.d, &p.d, s.n}, {"q", &s.q, &p.q, s.n}, {"rho", &s.rho, &p.rho, s.m}};
    for (const auto& b : vecs) {
        require_length(b.name, b.src->size(), s.N);
        for (int k = 0; k < s.N; ++k) {
            const Vector& v = (*b.src)[static_cast<std::size_t>(k)];
            require_shape(b.name, v, b.size);
            for (int t = 0; t <= k; ++t) {
                (*b.dst)(t, k) = v;
            }
        }
    }
    require_shape("G", s.G, s.n, s.n);
    require_shape("Gbar", s.Gbar, s.n, s.n);
    require_shape("g", s.g, s.n);
    p.G.assign(static_cast<std::size_t>(s.N), s.G);
    p.Gbar.assign(static_cast<std::size_t>(s.N), s.Gbar);
    p.g.assign(static_cast<std::size_t>(s.N), s.g);
    return p;
}

ProblemData from_no_meanfield(const PlainData& s) {
    ProblemData p = ProblemData::zeros(s.n, s.m, s.N);
    struct Copy {
        const char* name;
        const Family<Matrix>* src;
        Family<Matrix>* dst;
        int rows, cols;
    };
    const Copy mats[] = {
        {"A", &s.A, &p.A, s.n, s.n}, {"B", &s.B, &p.B, s.n, s.m}, {"C", &s.C, &p.C, s.n, s.n},
        {"D", &s.D, &p.D, s.n, s.m}, {"Q", &s.Q, &p.Q, s.n, s.n}, {"R", &s.R, &p.R, s.m, s.m},
    };
    for (const auto& c : mats) {
        if (c.src->rows() != s.N || c.src->last() != s.N - 1) {
            throw Error(ErrorKind::DimensionMismatch, std::string(c.name) + " does not cover the horizon");
        }
        for (int t = 0; t < s.N; ++t) {
            for (int k = t; k < s.N; ++k) {
                require_shape(c.name, (*c.src)(t, k), c.rows, c.cols);
                (*c.dst)(t, k) = (*c.src)(t, k);
            }
        }
    }
    struct CopyVec {
        const char* name;
        const Family<Vector>* src;
        Family<Vector>* dst;
        int size;
    };
    const CopyVec vecs[] = {
        {"f", &s.f, &p.f, s.n}, {"d", &s.d, &p.d, s.n}, {"q", &s.q, &p.q, s.n}, {"rho", &s.rho, &p.rho, s.m}};
    for (const auto& c : vecs) {
        if (c.src->rows() != s.N || c.src->last() != s.N - 1) {
            throw Error(ErrorKind::DimensionMismatch, std::string(c.name) + " does not cover the horizon");
        }
        for (int t = 0; t < s.N; ++t) {
            for (int k = t; k < s.N; ++k) {
                require_shape(c.name, (*c.src)(t, k), c.size);
                (*c.dst)(t, k) = (*c.src)(t, k);
            }
        }
    }
    require_length("G", s.G.size(), s.N);
    require_length("g", s.g.size(), s.N);
    for (int t = 0; t < s.N; ++t) {
        const auto i = static_cast<std::size_t>(t);
        require_shape("G", s.G[i], s.n, s.n);
        require_shape("g", s.g[i], s.n);
        p.G[i] = s.G[i];
        p.g[i] = s.g[i];
    }
    return p;
}

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

}  // namespace

ProblemData two_step_example() {
    ProblemData p = ProblemData::zeros(2, 2, 2);

    p.A(0, 0) = m2(3.3, 0.41, -1.3, 1.9);
    p.A(0, 1) = m2(5.12, -0.35, 1.31, 2.03);
    p.A(1, 1) = m2(8.5, 3.03, -2.23, 7.2);
    p.Abar(0, 0) = m2(3.34, -1.01, 1.43, 2.03);
    p.Abar(0, 1) = m2(3.45, -0.3, 1.2, 4);
    p.Abar(1, 1) = m2(5.67, 1.93, -1.16, 6.54);

    p.B(0, 0) = m2(3.5, 1.6, -0.2, 3);
    p.B(0, 1) = m2(4.45, 2.36, -1.2, 5);
    p.B(1, 1) = m2(7.35, -2.35, -3.38, 6.32);
    p.Bbar(0, 0) = m2(3.2, 0.32, 1.5, 3);
    p.Bbar(0, 1) = m2(3.65, -0.3, -0.42, 5.6);
    p.Bbar(1, 1) = m2(5.67, 1.93, -1.16, 6.54);

    p.C(0, 0) = m2(5.6, 1, 0.73, 7.8);
    p.C(0, 1) = m2(5, 0.73, -0.47, 5.2);
    p.C(1, 1) = m2(2.5, 3.03, -4.23, 6.2);
    p.Cbar(0, 0) = m2(5.6, 1, 0.73, 7.8);
    p.Cbar(0, 1) = m2(5, 0.73, -0.47, 5.2);
    p.Cbar(1, 1) = m2(10.17, 5.93, -6.16, 7.54);

    p.D(0, 0) = m2(6, 1.63, -1.37, 7);
    p.D(0, 1) = m2(4, 0.93, 1.07, 3);
    p.D(1, 1) = m2(8.56, -4.75, -2.8, 7);
    p.Dbar(0, 0) = m2(4.6, 0.63, -1.57, 6.4);
    p.Dbar(0, 1) = m2(4.4, 1.93, 2.34, 5.63);
    p.Dbar(1, 1) = m2(-8.72, 2.43, 1.16, -6.54);

    p.Q(0, 0) = m2(-1, 0.8, 0.8, -1.6);
    p.Q(0, 1) = m2(4, 0, 0, 0);
    p.Q(1, 1) = m2(2, 0.1, 0.1, 5);
    p.Qbar(0, 0) = m2(-0.5, -0.1, -0.1, 1);
    p.Qbar(0, 1) = m2(-2, 0, 0, -3);
    p.Qbar(1, 1) = m2(-1, 0.1, 0.1, -3);

    p.R(0, 0) = m2(-0.5, 0, 0, 1);
    p.R(0, 1) = m2(1, 0, 0, -2);
    p.R(1, 1) = m2(4, -0.3, -0.3, -2);
    p.Rbar(0, 0) = m2(0, 0, 0, 0);
    p.Rbar(0, 1) = m2(-2, 0, 0, 2);
    p.Rbar(1, 1) = m2(-7, -1.3, -1.3, -4);

    p.G = {m2(1, 0, 0, 2), m2(2, -0.3, -0.3, 3)};
    p.Gbar = {m2(2, 0, 0, 3), m2(-0.5, -0.2, -0.2, 1)};
    p.g = {v2(5.6, 7.8), v2(-9, 8.7)};

    p.f(0, 0) = v2(-0.5, -1);
    p.f(0, 1) = v2(-1.34, 2.5);
    p.f(1, 1) = v2(1, 2);
    p.d(0, 0) = v2(1.32, 2.79);
    p.d(0, 1) = v2(-0.35, 8.9);
    p.d(1, 1) = v2(0, 1);
    p.q(0, 0) = v2(-0.85, -1.8);
    p.q(0, 1) = v2(2, 7);
    p.q(1, 1) = v2(6, 8);
    p.rho(0, 0) = v2(3.2, 2.1);
    p.rho(0, 1) = v2(1.42, 2.71);
    p.rho(1, 1) = v2(6.2, -5.7);
    return p;
}

}  // namespace mflq
