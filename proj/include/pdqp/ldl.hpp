#pragma once

#include "pdqp/types.hpp"

#include <optional>
#include <vector>

namespace pdqp {

// P K Pᵀ = L D Lᵀ with Bunch–Kaufman 1×1/2×2 pivoting on the lower triangle.
// A pivot column whose largest entry is below `tol` is treated as singular.
class LdlFactor {
 public:
  struct Failure {
    Index step;  // elimination step at which no acceptable pivot existed
  };

  static std::optional<LdlFactor> factor(const Matrix& K, double tol, Failure* failure = nullptr);

  Index dim() const { return LD_.rows(); }
  Vector solve(const Vector& rhs) const;
  // Inertia counts from the block diagonal.
  Index negative_eigenvalues() const;

 private:
  Matrix LD_;                // L strictly below the diagonal, D on and beside it
  std::vector<Index> perm_;  // row i of PKPᵀ is row perm_[i] of K
  std::vector<int> block_;   // 1, or 2 at the first row of a 2×2 block, 0 at its second
};

// Infinity norm (max absolute row sum) of a dense matrix.
double inf_norm(const Matrix& K);

}  // namespace pdqp
