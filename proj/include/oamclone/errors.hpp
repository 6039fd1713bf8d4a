#pragma once

#include <stdexcept>
#include <string>

namespace oamclone {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid construction parameters (empty sets, out-of-range efficiencies, ...).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

// A state that cannot be normalized or violates a representation invariant.
class InvalidStateError : public Error {
public:
    using Error::Error;
};

// Operands built on different mode bases, or a mode missing from a basis.
class BasisError : public Error {
public:
    using Error::Error;
};

// An input state does not satisfy an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A statistical estimate is undefined for the supplied data.
class EstimateError : public Error {
public:
    using Error::Error;
};

}  // namespace oamclone
