#pragma once

namespace mflq {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace mflq
