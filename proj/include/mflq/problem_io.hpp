#pragma once

#include "mflq/canonical_json.hpp"
#include "mflq/problem.hpp"

#include <string>
#include <vector>

namespace mflq {

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);
Matrix matrix_from_json(const Json& j, const std::string& path);
Vector vector_from_json(const Json& j, const std::string& path);

/// Problem file layout:
///   {"n", "m", "N",
///    "data": {"A": {"t,k": [[...]], ...}, ...},
///    "terminal": {"G": [...], "Gbar": [...], "g": [...]}}
/// A family may also be a dense N×N list with null below the diagonal.
/// Absent blocks are left empty so validate() can name them.
/// Throws Error{InvalidInput} on malformed structure.
ProblemData problem_from_json(const Json& j);

/// Canonical form: every family as a "t,k" map.
Json problem_to_json(const ProblemData& p);

struct LoadedProblem {
    ProblemData problem;
    std::vector<Finding> findings;
};

/// Reads, validates and repairs small symmetry defects. Throws
/// Error{InvalidInput} when the file is unreadable, malformed, or validation
/// reports an error.
LoadedProblem load_problem(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace mflq
