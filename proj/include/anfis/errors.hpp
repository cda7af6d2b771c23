#pragma once

#include <stdexcept>
#include <string>

namespace anfis {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Membership-function parameter arity or ordering violated.
struct ParamError : Error {
    using Error::Error;
};

// Dimension mismatch between model, data, or vectors.
struct ShapeError : Error {
    using Error::Error;
};

// Invalid configuration value (counts, fractions, step sizes).
struct ConfigError : Error {
    using Error::Error;
};

// Non-finite values where finite arithmetic is required.
struct NumericError : Error {
    using Error::Error;
};

// CSV / file ingestion failure with location diagnostics.
struct IngestError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace anfis
