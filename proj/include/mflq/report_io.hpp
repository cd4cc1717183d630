#pragma once

#include "mflq/canonical_json.hpp"
#include "mflq/monte_carlo.hpp"
#include "mflq/problem.hpp"
#include "mflq/recursion.hpp"
#include "mflq/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mflq {

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

struct RunManifest {
    std::string command;
    std::string input_path;
    std::string input_hash;
    Json tolerances = Json::object();
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
    double wall_time_seconds = 0.0;
};

Json manifest_to_json(const RunManifest& m);

Json findings_to_json(const std::vector<Finding>& findings);
Json gains_to_json(const GainSchedule& g);
Json report_to_json(const SolvabilityReport& r, const ConvexityResult& c);
Json tables_to_json(const RecursionTables& t);

/// Gains, solvability report and (when requested) the full tables.
Json solution_to_json(const Solution& s, bool include_tables);

/// Reads the "gains" object written by gains_to_json. Psi and alpha are
/// required; W, Wdag, H and beta are read when present. Throws
/// Error{InvalidInput} on malformed content and Error{DimensionMismatch} when
/// shapes disagree with (n, m, N).
GainSchedule gains_from_json(const Json& j, int n, int m, int N);

Json certificate_to_json(const EquilibriumCertificate& c);
Json sim_to_json(const SimResult& r);

}  // namespace mflq
