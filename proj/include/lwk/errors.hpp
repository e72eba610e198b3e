#pragma once

#include <stdexcept>
#include <string>

namespace lwk {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mismatched grid specs or vector lengths.
struct ShapeError : Error {
    using Error::Error;
};

/// Invalid scalar argument (beta <= 0, lambda < 0, ...).
struct ParameterError : Error {
    using Error::Error;
};

/// Linear or nonlinear solve failed (iteration cap, indefinite system).
struct SolverError : Error {
    using Error::Error;
};

/// Config file problems, reported with line/key context.
struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace lwk
