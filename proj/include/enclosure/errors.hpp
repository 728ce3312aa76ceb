#pragma once

#include <stdexcept>
#include <string>

namespace enclosure {

/// A time-window / pulse-size precondition fails (reported with its margin).
struct AdmissibilityError : std::runtime_error {
    explicit AdmissibilityError(const std::string& what) : std::runtime_error(what) {}
};

/// A shape is malformed or a containment/margin requirement is violated.
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Solver blow-up, non-finite data, or a stability-bound violation.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed configuration or input file.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace enclosure
