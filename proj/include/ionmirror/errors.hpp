// errors.hpp — Exception hierarchy shared by all modules.

#pragma once

#include <stdexcept>
#include <string>

namespace ionmirror {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad caller input: malformed configs, out-of-range parameters, ...
// Maps to CLI exit status 1.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

// Mode or matrix dimension violates a contract (dim < 2, mismatch, ...).
class DimensionError : public InvalidArgumentError {
public:
    using InvalidArgumentError::InvalidArgumentError;
};

// Numerical failures map to CLI exit status 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

// A Fock cutoff too small to hold the requested coherent amplitude.
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Non-finite entries encountered during evolution.
class OverflowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Composite dimension exceeds the global per-state memory cap.
class MemoryCapError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace ionmirror
