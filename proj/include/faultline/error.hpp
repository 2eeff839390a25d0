#pragma once

#include <stdexcept>
#include <string>

namespace faultline {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files: CSV, schema JSON, penalty JSON, training tables.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Team sizes that cannot cover the population exactly.
class InfeasibleSizes : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace faultline
