#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cwe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Per-path flow, indexed by path position in the game spec.
using FlowVector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A formula was evaluated outside its domain (e.g. M == m for beta).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested evaluation has no closed form or is otherwise unsupported.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// The operator produced NaN/inf, or a numerical procedure broke down.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace cwe
