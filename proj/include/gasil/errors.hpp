#pragma once

#include <stdexcept>
#include <string>

namespace gasil {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape/dimension mismatch between a value and what an operation expects.
struct DimensionError : Error {
    using Error::Error;
};

// Non-finite value showed up where the math requires a finite one.
struct NumericError : Error {
    using Error::Error;
};

// API called out of order (e.g. step() after done without reset()).
struct ProtocolError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace gasil
