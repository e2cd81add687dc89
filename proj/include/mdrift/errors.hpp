#pragma once

#include <stdexcept>
#include <string>

namespace mdrift {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (t outside [0,T], H outside [1/2,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or arithmetic produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A covariance matrix could not be factorized.
class DecompositionError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The Gram matrix of the design is singular or too ill-conditioned to solve.
class SingularDesignError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Gram-Schmidt input Gramian is numerically singular.
class IllConditionedBasisError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The requested operation is not provided for this object kind.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch (m > N, ragged ensembles, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mdrift
