#pragma once

#include <stdexcept>
#include <string>

namespace rbr {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: unreadable file, malformed cell, wrong shape.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Bad model file or model/data mismatch.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an argument contract (length mismatch, k out of range...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace rbr
