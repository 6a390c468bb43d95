#pragma once

#include <stdexcept>
#include <string>

namespace epp {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class UnsupportedOperator : public Error {
public:
    using Error::Error;
};

/// The modified projection problem has no unique minimizer for this
/// operator / subspace pair.
class UniquenessError : public Error {
public:
    using Error::Error;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace epp
