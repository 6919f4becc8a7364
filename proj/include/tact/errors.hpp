#pragma once

#include <stdexcept>
#include <string>

namespace tact {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (bad syntax, unparsable field).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input violating the data-model schema
// (wrong channel count, unknown enum value, version mismatch).
struct SchemaError : Error {
    using Error::Error;
};

// Semantic invariant violation (overlapping segments, bad ranges).
struct ValidationError : Error {
    using Error::Error;
};

// Bad run parameters (bin too narrow, k out of range, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Numerical failure (non-finite values, solver breakdown).
struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace tact
