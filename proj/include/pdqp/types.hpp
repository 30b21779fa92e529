#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace pdqp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Thrown when problem data is rejected at construction time.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A subiteration entered without its precondition (e.g. z_l + r_l == 0).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A solver invariant broke at run time: a K_B or K_l that the theory says
// is nonsingular failed to factor, or a warm start was invalid.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pdqp
