#pragma once

#include <stdexcept>
#include <string>

namespace adia {

// Base of every failure raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problems with inputs: bad configs, malformed files, invalid call arguments.
struct ConfigError : Error {
    using Error::Error;
};

struct TimeOutOfDomain : ConfigError {
    using ConfigError::ConfigError;
};

struct NonHermitianSample : ConfigError {
    using ConfigError::ConfigError;
};

struct NonNormalizedInput : ConfigError {
    using ConfigError::ConfigError;
};

struct GridMismatch : ConfigError {
    using ConfigError::ConfigError;
};

// Failures of the numerics themselves; the inputs were well formed.
struct NumericalError : Error {
    using Error::Error;
};

// The no-crossing assumption is violated: an adjacent eigenvalue gap fell
// below the gap floor.
struct DegenerateSpectrum : NumericalError {
    using NumericalError::NumericalError;
};

// Eigenvalue ordering between adjacent frames became ambiguous.
struct LevelTrackingLost : NumericalError {
    using NumericalError::NumericalError;
};

// Step-halving refinement disagreed with the primary run.
struct StepTooCoarse : NumericalError {
    using NumericalError::NumericalError;
};

struct InsufficientGrid : NumericalError {
    using NumericalError::NumericalError;
};

struct PhaseUndefined : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace adia
