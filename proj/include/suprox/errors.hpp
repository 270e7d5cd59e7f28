#pragma once

#include <stdexcept>
#include <string>

namespace suprox {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on a parameter or configuration value was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Operand shapes disagree (image vs grid, vector vs row count, ...).
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// The file was readable but its content does not follow the format.
class MalformedFile : public Error {
public:
    using Error::Error;
};

/// A header announces dimensions that cannot be represented or allocated.
class DimensionOverflow : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidArgument(what);
}

inline void require_dims(bool cond, const std::string& what) {
    if (!cond) throw DimensionMismatch(what);
}

}  // namespace detail
}  // namespace suprox
