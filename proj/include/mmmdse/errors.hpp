#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmmdse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent or malformed hardware / data-type description.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Data type that the memory blocks of the target cannot serve.
class UnsupportedTypeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A configuration violates a hard constraint (resources, blocks, chain depth, ...).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Matrix or tile extents that do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Error while reading a spec file, CSV or matrix file. Carries the 1-based line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace mmmdse
