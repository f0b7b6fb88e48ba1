#pragma once

#include <stdexcept>
#include <string>

namespace dasflow {

// Runtime failures that are not caller bugs. Precondition violations throw
// std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A file does not match its declared format.
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Numerical breakdown: singular evaluation point, rank-deficient fit, ...
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace dasflow
