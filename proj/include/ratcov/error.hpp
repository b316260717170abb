#pragma once

#include <stdexcept>
#include <string>

namespace ratcov {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (bad index set, negative value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse for the index set: 2 n_j < N_j does not hold.
class AliasingError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Covariance data failed the sampled dual-cone test.
class ConeError : public Error {
 public:
  using Error::Error;
};

/// Optimizer did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed file or stream.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ratcov
