#pragma once

#include <json.hpp>

#include <string>

namespace mflq {

using Json = nlohmann::json;

/// Shortest-free fixed form used in every file we write: 17 significant
/// digits, so a parse/format cycle reproduces the same bytes.
std::string format_double(double value);

/// Serializes with sorted keys, two-space indentation, numeric arrays kept on
/// one line, LF line endings and a trailing newline. Non-finite numbers are
/// written as null.
std::string to_canonical_json(const Json& j);

}  // namespace mflq
