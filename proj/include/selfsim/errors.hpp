#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

/// Base class for all solver-level failures.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A zero was hit with |f'| below the derivative floor, so the crossing
/// cannot be used to restart the shot on the opposite branch.
struct TangencyError : SolverError {
    explicit TangencyError(const std::string& what) : SolverError(what) {}
};

/// Requested operation lies outside the parameter range the method covers
/// (e.g. infinity shot below the alpha threshold for the given dimension).
struct UnsupportedError : SolverError {
    explicit UnsupportedError(const std::string& what) : SolverError(what) {}
};

/// Bracket expansion for a root search ran past its cap without a sign change.
struct BracketExhausted : SolverError {
    explicit BracketExhausted(const std::string& what) : SolverError(what) {}
};

/// Bad user-facing input (CLI flags, config file values).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace selfsim
