#pragma once

#include <stdexcept>
#include <string>

namespace nfr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs that violate a documented precondition (dimensions, ranges).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A policy that fails validation where a valid one is required.
class InvalidPolicy : public Error {
 public:
  using Error::Error;
};

/// An optimization problem with no feasible point.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Numerical failure or a solver that did not reach optimality.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// File-system or parse failure while reading/writing artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nfr
