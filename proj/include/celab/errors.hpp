#pragma once

#include <stdexcept>
#include <string>

namespace celab {

// Error taxonomy mirrors the CLI exit codes: config -> 1, numeric/resource -> 2, io -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Precondition violations on mathematical inputs (empty Crit', degree too small, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Convergence failures, lifting failures, degenerate geometry.
class NumericError : public Error {
public:
    using Error::Error;
};

// Caps exceeded (branch counts, vertex budgets).
class ResourceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace celab
