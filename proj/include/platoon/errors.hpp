#pragma once

#include <stdexcept>
#include <string>

namespace platoon {

/// Synthesis could not produce gains (infeasible H-infinity level,
/// rank-deficient observer geometry, ...). Maps to CLI exit code 2.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// A persisted gains bundle does not match the scenario it is used with.
/// Maps to CLI exit code 4.
struct DigestMismatchError : std::runtime_error {
    explicit DigestMismatchError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace platoon
