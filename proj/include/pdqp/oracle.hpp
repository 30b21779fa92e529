#pragma once

#include "pdqp/active_set.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace pdqp {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleSolution {
  Status status = Status::Optimal;
  Iterate iterate;
  double objective = 0;  // f_P of the shifted problem
  Partition witness;
  bool primal_feasible = false;
  bool dual_feasible = false;
  long partitions_tried = 0;
  long optimal_witnesses = 0;
};

// Exhaustive enumeration of partitions (each variable basic or at one of its
// finite bounds). Throws BudgetExceeded beyond 2^16 candidates or n > 16.
OracleSolution enumerate_solve(const QpProblem& p, const Shifts& s);

// The two sets of the joint optimality characterization, decided by
// enumerating supports.
bool primal_set_nonempty(const QpProblem& p, const Shifts& s);
bool dual_set_nonempty(const QpProblem& p, const Shifts& s);

struct PropertyReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::string branch;
  double lhs = 0, rhs = 0;  // primal identity sides, when applicable
  double dual_lhs = 0, dual_rhs = 0;

  void fail(std::string what) {
    ok = false;
    violations.push_back(std::move(what));
  }
  std::string summary() const;
};

// Homogeneous system residuals, the inner-product identity and the
// base/intermediate case dichotomies (with SVD rank tests of K_B and K_l).
PropertyReport check_direction_propositions(const QpProblem& p, const Partition& part,
                                            const Direction& dir);

// Closed-form objective change along it + α·dir against direct evaluation.
PropertyReport check_objective_identity(const QpProblem& p, const Shifts& s, const Iterate& it,
                                        const Direction& dir, double alpha);

// Numerical rank by SVD, relative tolerance on the largest singular value.
Index numerical_rank(const Matrix& K, double rel = 1e-9);

// Gaussian elimination with partial pivoting; throws InternalError if a
// pivot vanishes.
Vector gaussian_solve(Matrix K, Vector rhs);

}  // namespace pdqp
