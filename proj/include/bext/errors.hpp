#pragma once

#include <stdexcept>
#include <string>

namespace bext {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a documented invariant (bad table, bad index, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The numerical conformal solver failed to reach the requested accuracy.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A caller supplied arguments outside an operation's precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace bext
