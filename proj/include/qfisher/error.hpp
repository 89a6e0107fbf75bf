#pragma once

#include <stdexcept>
#include <string>

namespace qfisher {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad grid, mismatched grids, out-of-range option).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Overflow, non-finite values, or a density that is not negligible at the boundary.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure; the message names the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfisher
