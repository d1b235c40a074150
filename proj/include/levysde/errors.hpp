#pragma once

#include <stdexcept>
#include <string>

namespace levysde {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed call or configuration (bad field, missing input, empty data).
struct UsageError : Error {
    using Error::Error;
};

// Numeric parameter outside its admissible range.
struct ParameterError : Error {
    using Error::Error;
};

// Fixed-point iteration failed to reach tolerance within the iteration cap.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double residual)
        : Error(what), last_residual(residual) {}
    double last_residual;
};

// Too few usable points for a statistical fit.
struct InsufficientDataError : Error {
    using Error::Error;
};

// A trajectory produced a non-finite coordinate.
struct BlownPathError : Error {
    BlownPathError(const std::string& what, double t) : Error(what), time(t) {}
    double time;
};

// Process exit codes used by the CLI.
enum class ExitCode : int {
    ok = 0,
    failure = 1,
    usage = 2,
    admissibility = 3,
    convergence = 4,
    insufficient_data = 5,
};

}  // namespace levysde
