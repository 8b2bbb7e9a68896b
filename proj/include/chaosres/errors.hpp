#pragma once

#include <stdexcept>
#include <string>

namespace chaosres {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes of two operands disagree (tensor vs ensemble, matrix vs vector).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A documented precondition on an argument does not hold.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A chaos that is constant on the cube, so no certificate can be formed.
class DegenerateChaosError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A computation was refused because it exceeds its size budget.
class GuardError : public Error {
public:
    using Error::Error;
};

/// Malformed external input (tensor files, generator specs).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace chaosres
