#pragma once

#include <stdexcept>
#include <string>

namespace interfuse {

/// Base for every error the engine raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a documented format or invariant (CLI exit code 2).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Caller passed an inconsistent combination of options (CLI exit code 1).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Unreadable or unwritable path.
class IoError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace interfuse
