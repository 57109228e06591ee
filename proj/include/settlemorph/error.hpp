#pragma once

#include <stdexcept>
#include <string>

namespace settlemorph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input file. The message carries file/row/column context.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Metric requested for a class with no cells (all-zero raster).
class EmptyClassError : public Error {
 public:
  using Error::Error;
};

/// A linear system could not be factorized (singular or indefinite).
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace settlemorph
