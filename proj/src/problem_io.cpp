#include "mflq/problem_io.hpp"

#include "mflq/error.hpp"

#include <fstream>
#include <sstream>

namespace mflq {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
    throw Error(ErrorKind::InvalidInput, path + ": " + why);
}

double number_at(const Json& j, const std::string& path) {
    if (!j.is_number()) {
        bad(path, "expected a number");
    }
    return j.get<double>();
}

std::string pair_key(int t, int k) { return std::to_string(t) + "," + std::to_string(k); }

template <typename T, typename Parse>
Family<T> family_from_json(const Json& j, int N, const std::string& name, Parse parse) {
    Family<T> fam(N, N - 1);
    if (j.is_null()) {
        return fam;
    }
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            int t = -1, k = -1;
            char comma = 0;
            std::istringstream is(it.key());
            if (!(is >> t >> comma >> k) || comma != ',' || !is.eof() || !fam.contains(t, k)) {
                bad(name, "bad index key \"" + it.key() + "\"");
            }
            if (!it.value().is_null()) {
                fam(t, k) = parse(it.value(), name + "[" + std::to_string(t) + "][" + std::to_string(k) + "]");
            }
        }
        return fam;
    }
    if (j.is_array()) {
        if (j.size() != static_cast<std::size_t>(N)) {
            bad(name, "dense family must have N rows");
        }
        for (int t = 0; t < N; ++t) {
            const Json& row = j[static_cast<std::size_t>(t)];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(N)) {
                bad(name, "dense family must be N x N");
            }
            for (int k = 0; k < N; ++k) {
                const Json& e = row[static_cast<std::size_t>(k)];
                if (k < t) {
                    if (!e.is_null()) {
                        bad(name, "entries below the diagonal must be null");
                    }
                    continue;
                }
                if (!e.is_null()) {
                    fam(t, k) = parse(e, name + "[" + std::to_string(t) + "][" + std::to_string(k) + "]");
                }
            }
        }
        return fam;
    }
    bad(name, "family must be an object or a list");
}

int positive_int(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<int>() < 1) {
        bad(key, "must be a positive integer");
    }
    return j.at(key).get<int>();
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(i, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
        bad(path, "matrix must be a non-empty list of rows");
    }
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) {
        bad(path, "matrix rows must be non-empty lists");
    }
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            bad(path, "ragged matrix");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = number_at(j[i][c], path);
        }
    }
    return m;
}

Vector vector_from_json(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) {
        bad(path, "vector must be a non-empty list");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = number_at(j[i], path);
    }
    return v;
}

ProblemData problem_from_json(const Json& j) {
    if (!j.is_object()) {
        bad("problem", "top level must be an object");
    }
    ProblemData p;
    p.n = positive_int(j, "n");
    p.m = positive_int(j, "m");
    p.N = positive_int(j, "N");
    const int N = p.N;
    const Json empty = Json::object();
    const Json& data = j.contains("data") ? j.at("data") : empty;
    if (!data.is_object()) {
        bad("data", "must be an object");
    }
    const auto get = [&](const char* key) -> Json {
        return data.contains(key) ? data.at(key) : Json(nullptr);
    };

    struct MatrixKey {
        const char* key;
        Family<Matrix>* dst;
    };
    const MatrixKey mats[] = {
        {"A", &p.A}, {"Abar", &p.Abar}, {"B", &p.B}, {"Bbar", &p.Bbar},
        {"C", &p.C}, {"Cbar", &p.Cbar}, {"D", &p.D}, {"Dbar", &p.Dbar},
        {"Q", &p.Q}, {"Qbar", &p.Qbar}, {"R", &p.R}, {"Rbar", &p.Rbar},
    };
    for (const auto& mk : mats) {
        *mk.dst = family_from_json<Matrix>(get(mk.key), N, mk.key, matrix_from_json);
    }
    struct VectorKey {
        const char* key;
        Family<Vector>* dst;
    };
    const VectorKey vecs[] = {{"f", &p.f}, {"d", &p.d}, {"q", &p.q}, {"rho", &p.rho}};
    for (const auto& vk : vecs) {
        *vk.dst = family_from_json<Vector>(get(vk.key), N, vk.key, vector_from_json);
    }
    for (auto it = data.begin(); it != data.end(); ++it) {
        static const char* known[] = {"A", "Abar", "B", "Bbar", "C", "Cbar", "D", "Dbar",
                                      "Q", "Qbar", "R", "Rbar", "f",  "d",   "q", "rho"};
        bool ok = false;
        for (const char* k : known) {
            ok = ok || it.key() == k;
        }
        if (!ok) {
            bad("data", "unknown key \"" + it.key() + "\"");
        }
    }

    const Json& terminal = j.contains("terminal") ? j.at("terminal") : empty;
    p.G.assign(static_cast<std::size_t>(N), Matrix());
    p.Gbar.assign(static_cast<std::size_t>(N), Matrix());
    p.g.assign(static_cast<std::size_t>(N), Vector());
    const auto read_terminal = [&](const char* key, auto& dst, auto parse) {
        if (!terminal.contains(key)) {
            return;
        }
        const Json& arr = terminal.at(key);
        if (!arr.is_array() || arr.size() != static_cast<std::size_t>(N)) {
            bad(key, "terminal data must list one entry per initial time");
        }
        for (std::size_t t = 0; t < arr.size(); ++t) {
            if (!arr[t].is_null()) {
                dst[t] = parse(arr[t], std::string(key) + "[" + std::to_string(t) + "]");
            }
        }
    };
    read_terminal("G", p.G, matrix_from_json);
    read_terminal("Gbar", p.Gbar, matrix_from_json);
    read_terminal("g", p.g, vector_from_json);
    return p;
}

Json problem_to_json(const ProblemData& p) {
    Json data = Json::object();
    const auto put_family = [&](const char* key, const auto& fam, auto to_json) {
        Json obj = Json::object();
        for (int t = 0; t < p.N; ++t) {
            for (int k = t; k < p.N; ++k) {
                obj[pair_key(t, k)] = to_json(fam(t, k));
            }
        }
        data[key] = std::move(obj);
    };
    put_family("A", p.A, matrix_to_json);
    put_family("Abar", p.Abar, matrix_to_json);
    put_family("B", p.B, matrix_to_json);
    put_family("Bbar", p.Bbar, matrix_to_json);
    put_family("C", p.C, matrix_to_json);
    put_family("Cbar", p.Cbar, matrix_to_json);
    put_family("D", p.D, matrix_to_json);
    put_family("Dbar", p.Dbar, matrix_to_json);
    put_family("Q", p.Q, matrix_to_json);
    put_family("Qbar", p.Qbar, matrix_to_json);
    put_family("R", p.R, matrix_to_json);
    put_family("Rbar", p.Rbar, matrix_to_json);
    put_family("f", p.f, vector_to_json);
    put_family("d", p.d, vector_to_json);
    put_family("q", p.q, vector_to_json);
    put_family("rho", p.rho, vector_to_json);

    Json terminal = Json::object();
    Json G = Json::array(), Gbar = Json::array(), g = Json::array();
    for (int t = 0; t < p.N; ++t) {
        G.push_back(matrix_to_json(p.G_at(t)));
        Gbar.push_back(matrix_to_json(p.Gbar_at(t)));
        g.push_back(vector_to_json(p.g_at(t)));
    }
    terminal["G"] = std::move(G);
    terminal["Gbar"] = std::move(Gbar);
    terminal["g"] = std::move(g);

    Json out = Json::object();
    out["n"] = p.n;
    out["m"] = p.m;
    out["N"] = p.N;
    out["data"] = std::move(data);
    out["terminal"] = std::move(terminal);
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::InvalidInput, "cannot write " + path);
    }
    out << text;
}

LoadedProblem load_problem(const std::string& path) {
    const std::string text = read_text_file(path);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
    }
    LoadedProblem out{problem_from_json(j), {}};
    out.findings = validate(out.problem);
    if (has_errors(out.findings)) {
        std::string msg = path + " failed validation:";
        for (const auto& f : out.findings) {
            if (f.severity == Severity::Error) {
                msg += " " + f.path + " (" + f.message + ");";
            }
        }
        throw Error(ErrorKind::InvalidInput, msg);
    }
    symmetrize_weights(out.problem);
    return out;
}

}  // namespace mflq
