#include "mflq/report_io.hpp"

#include "mflq/error.hpp"
#include "mflq/problem_io.hpp"
#include "mflq/version.hpp"

#include <cmath>
#include <cstdio>

namespace mflq {

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Json manifest_to_json(const RunManifest& m) {
    Json j = Json::object();
    j["command"] = m.command;
    j["input_path"] = m.input_path;
    j["input_hash"] = m.input_hash;
    j["tolerances"] = m.tolerances;
    j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
    j["outputs"] = m.outputs;
    j["tool_version"] = kToolVersion;
    j["wall_time_seconds"] = m.wall_time_seconds;
    return j;
}

Json findings_to_json(const std::vector<Finding>& findings) {
    Json out = Json::array();
    for (const auto& f : findings) {
        out.push_back({{"severity", f.severity == Severity::Error ? "error" : "warning"},
                       {"path", f.path},
                       {"message", f.message},
                       {"defect", f.defect}});
    }
    return out;
}

namespace {

template <typename T, typename F>
Json list(const std::vector<T>& v, F to_json) {
    Json out = Json::array();
    for (const auto& e : v) {
        out.push_back(to_json(e));
    }
    return out;
}

Json double_list(const std::vector<double>& v) {
    Json out = Json::array();
    for (double d : v) {
        out.push_back(d);
    }
    return out;
}

}  // namespace

Json gains_to_json(const GainSchedule& g) {
    return {{"W", list(g.W, matrix_to_json)},       {"Wdag", list(g.Wdag, matrix_to_json)},
            {"H", list(g.H, matrix_to_json)},       {"beta", list(g.beta, vector_to_json)},
            {"Psi", list(g.Psi, matrix_to_json)},   {"alpha", list(g.alpha, vector_to_json)}};
}

Json report_to_json(const SolvabilityReport& r, const ConvexityResult& c) {
    return {{"convexity_margins", double_list(r.convexity_margins)},
            {"convexity_tolerances", double_list(r.convexity_tolerances)},
            {"M2", list(c.M2, matrix_to_json)},
            {"rangeH_residuals", double_list(r.rangeH_residuals)},
            {"rangeBeta_residuals", double_list(r.rangeBeta_residuals)},
            {"range_tolerance", r.range_tolerance},
            {"verdict_all_pairs", r.verdict_all_pairs},
            {"per_pair_note", r.per_pair_note}};
}

Json tables_to_json(const RecursionTables& t) {
    Json out = Json::object();
    const auto put = [&](const char* key, const auto& fam, auto to_json) {
        Json obj = Json::object();
        for (int k = 0; k < fam.rows(); ++k) {
            for (int l = k; l <= fam.last(); ++l) {
                obj[std::to_string(k) + "," + std::to_string(l)] = to_json(fam(k, l));
            }
        }
        out[key] = std::move(obj);
    };
    put("P", t.P, matrix_to_json);
    put("Pcal", t.Pcal, matrix_to_json);
    put("T", t.T, matrix_to_json);
    put("Tcal", t.Tcal, matrix_to_json);
    put("pi", t.pi, vector_to_json);
    return out;
}

Json solution_to_json(const Solution& s, bool include_tables) {
    Json out = {{"gains", gains_to_json(s.gains)}, {"report", report_to_json(s.report, s.convexity)}};
    if (include_tables) {
        out["tables"] = tables_to_json(s.tables);
    }
    return out;
}

GainSchedule gains_from_json(const Json& j, int n, int m, int N) {
    if (!j.is_object() || !j.contains("Psi") || !j.contains("alpha")) {
        throw Error(ErrorKind::InvalidInput, "gains need Psi and alpha");
    }
    const auto read = [&](const char* key, auto parse, auto& dst, int rows, int cols) {
        if (!j.contains(key)) {
            return;
        }
        const Json& arr = j.at(key);
        if (!arr.is_array() || arr.size() != static_cast<std::size_t>(N)) {
            throw Error(ErrorKind::DimensionMismatch, std::string(key) + " must list one entry per step");
        }
        dst.clear();
        for (std::size_t k = 0; k < arr.size(); ++k) {
            auto v = parse(arr[k], std::string(key) + "[" + std::to_string(k) + "]");
            if (v.rows() != rows || v.cols() != cols) {
                throw Error(ErrorKind::DimensionMismatch, std::string(key) + " has the wrong shape");
            }
            dst.push_back(std::move(v));
        }
    };
    GainSchedule g;
    read("W", matrix_from_json, g.W, m, m);
    read("Wdag", matrix_from_json, g.Wdag, m, m);
    read("H", matrix_from_json, g.H, m, n);
    read("beta", vector_from_json, g.beta, m, 1);
    read("Psi", matrix_from_json, g.Psi, m, n);
    read("alpha", vector_from_json, g.alpha, m, 1);
    return g;
}

Json certificate_to_json(const EquilibriumCertificate& c) {
    Json gaps = Json::array();
    for (const auto& g : c.deviation_gaps) {
        gaps.push_back({{"k", g.k}, {"scale", g.scale}, {"sample", g.sample}, {"gap", g.gap},
                        {"tolerance", g.tolerance}});
    }
    return {{"t", c.t},
            {"stationary_residuals", double_list(c.stationary_residuals)},
            {"convexity_values", double_list(c.convexity_values)},
            {"convexity_tolerances", double_list(c.convexity_tolerances)},
            {"deviation_gaps", std::move(gaps)},
            {"gaps_nonnegative", c.gaps_nonnegative},
            {"verdict", c.verdict},
            {"seed", c.options.seed},
            {"tolerances",
             {{"stationary", c.options.stationary_tolerance},
              {"convexity", c.options.convexity_tolerance},
              {"gap", c.options.gap_tolerance}}}};
}

Json sim_to_json(const SimResult& r) {
    Json out = {{"t", r.t},
                {"paths", r.paths},
                {"mean_cost", r.mean_cost},
                {"std_error", std::isfinite(r.std_error) ? Json(r.std_error) : Json(nullptr)},
                {"mean", list(r.mean, vector_to_json)},
                {"covariance", list(r.covariance, matrix_to_json)}};
    if (!r.path_sample.empty()) {
        Json paths = Json::array();
        for (const auto& path : r.path_sample) {
            paths.push_back(list(path, vector_to_json));
        }
        out["path_sample"] = std::move(paths);
    }
    return out;
}

}  // namespace mflq
