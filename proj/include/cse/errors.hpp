#pragma once

#include <stdexcept>
#include <string>

namespace cse {

// Every failure the library raises derives from Error so callers can map
// the category to a process exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration, cloud geometry or observation grid.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of a formula (coincident atoms, zero separation).
class DomainError : public Error {
public:
    using Error::Error;
};

// Eigensolver failure, residual check failure, integrator overflow.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Unwritable output location or unreadable input file.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cse
