#pragma once

#include <stdexcept>
#include <string>

namespace mflq {

enum class ErrorKind {
    NonFinite,
    NonSquare,
    DimensionMismatch,
    HorizonMismatch,
    EpsilonNonPositive,
    EmptyConfig,
    InvalidInput,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying the failure category named in each operation's contract.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace mflq
