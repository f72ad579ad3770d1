#pragma once

#include <stdexcept>
#include <string>

namespace periflow {

// Raised when a problem description (CLI config file or parameter set) is
// malformed or violates a documented precondition.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when the collocation matrix has an exactly vanishing pivot.
// Carries the condition estimate available at the point of failure so
// callers can report it.
class SingularSystemError : public std::runtime_error {
public:
    SingularSystemError(const std::string& what, double condition_estimate)
        : std::runtime_error(what), condition_estimate(condition_estimate) {}

    double condition_estimate;
};

} // namespace periflow
