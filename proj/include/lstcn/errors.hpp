#pragma once

#include <stdexcept>
#include <string>

namespace lstcn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// The regularized normal equations could not be factorized.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Malformed or unusable input data (CSV content, series length, parameters).
class DataError : public Error {
public:
    using Error::Error;
};

/// Malformed model or prior file.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace lstcn
