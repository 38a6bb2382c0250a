#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ioperiod {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed trace line. Line numbers are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A record or configuration violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bad function argument (non-positive rate, empty window, bin out of range).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// All single-sided amplitudes are equal, so Z-scores are undefined.
class DegenerateSpectrumError : public Error {
public:
    using Error::Error;
};

/// Fewer than two complete periods fit in the analysis window.
class InsufficientPeriodsError : public Error {
public:
    using Error::Error;
};

/// The analysis window carries no I/O volume.
class NoDataError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ioperiod
