#pragma once

#include <stdexcept>
#include <string>

namespace consensus_lab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scenario input. The message carries the field path (and the
/// byte offset for syntax errors).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A model that fails its invariants.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An operation called outside its domain (reducible matrix where an
/// irreducible one is required, beta >= 1, wrong dimensions, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The model does not carry the data an operation needs (e.g. CPS checks on
/// marginal-only beliefs).
class CapabilityError : public Error {
public:
    using Error::Error;
};

}  // namespace consensus_lab
