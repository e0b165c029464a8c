#pragma once

#include <stdexcept>
#include <string>

namespace pframe {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (shape, symmetry, schema, non-finite data).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A mathematical precondition does not hold, e.g. a numerically singular
/// frame operator where S^{-1/2} is required.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A multi-stage computation could not complete (sample budget exhausted,
/// solver did not converge).
class StageFailure : public Error {
public:
    using Error::Error;
};

} // namespace pframe
