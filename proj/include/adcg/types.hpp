#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace adcg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point in a model's parameter set. Units are model specific.
using ParameterPoint = Eigen::VectorXd;

/// Raised when vector or parameter lengths disagree with a model.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization or iteration cannot produce a usable answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adcg
