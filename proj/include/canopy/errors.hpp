#ifndef CANOPY_ERRORS_HPP
#define CANOPY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace canopy {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller violated an operation's preconditions.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Malformed input text (CSV cell, label line, KB document). Messages carry
/// the row/line location where one is known.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a domain invariant
/// (year gaps, negative tonnage, duplicate keys, bad stage bounds).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A computation produced a non-finite intermediate or an undefined metric.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration problems. The CLI maps these to exit code 2,
/// everything else above to exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace canopy

#endif
