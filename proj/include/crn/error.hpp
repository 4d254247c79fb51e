#pragma once

#include <stdexcept>
#include <string>

namespace crn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called on input outside its domain (higher-order
/// network passed to a first-order routine, zero direction, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Floating-point machinery failed (eigen-solver, blow-up, singular block).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A structural consequence that the theory guarantees did not hold.
/// Seeing one of these means a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace crn
