#pragma once

#include <stdexcept>
#include <string>

namespace plapreg {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument (range, shape, grid match) was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data contained NaN or infinity.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression was evaluated at a point where it is undefined.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

/// A solve inside a harness did not converge. The message names the cell.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace plapreg
