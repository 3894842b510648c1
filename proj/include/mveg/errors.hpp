#pragma once

#include <stdexcept>
#include <string>

namespace mveg {

// Bad user input: malformed config, invalid parameters, rejected metric.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operands from incompatible spaces or with mismatched sizes.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// An integrator step did not converge.
struct StepFailure : std::runtime_error {
    StepFailure(const std::string& msg, double at_time)
        : std::runtime_error(msg), t(at_time) {}
    double t;
};

// Root bracketing or other numeric preconditions failed.
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Should-not-happen conditions (e.g. the flat-norm LP reporting unbounded).
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mveg
