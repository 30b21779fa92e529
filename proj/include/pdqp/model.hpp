#pragma once

#include "pdqp/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace pdqp {

// Convex QP in the form
//   min ½xᵀHx + ½yᵀMy + cᵀx   s.t.  Ax + My = b,  lower ≤ x ≤ upper.
// The default bounds are lower = 0, upper = +inf. Construction validates
// dimensions, symmetry, semidefiniteness of H and M and the rank of [A M].
class QpProblem {
 public:
  QpProblem(Matrix H, Matrix M, Matrix A, Vector b, Vector c);
  QpProblem(Matrix H, Matrix M, Matrix A, Vector b, Vector c, Vector lower, Vector upper);

  Index n() const { return c_.size(); }
  Index m() const { return b_.size(); }
  const Matrix& H() const { return H_; }
  const Matrix& M() const { return M_; }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& c() const { return c_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool has_lower(Index i) const { return lower_[i] > -kInf; }
  bool has_upper(Index i) const { return upper_[i] < kInf; }
  bool is_free(Index i) const { return !has_lower(i) && !has_upper(i); }

 private:
  Matrix H_, M_, A_;
  Vector b_, c_, lower_, upper_;
};

// Primal and dual bound shifts. q moves the lower bound to lower − q,
// q_upper moves the upper bound to upper + q_upper, r shifts the reduced
// costs (the dual constraints read z + r ≥ 0 at a lower bound).
struct Shifts {
  Vector q;
  Vector r;
  Vector q_upper;

  static Shifts zero(Index n);
};

double lower_eff(const QpProblem& p, const Shifts& s, Index i);
double upper_eff(const QpProblem& p, const Shifts& s, Index i);

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper, TempFixed, Freed };

// B, N and the freed index l. Nonbasic variables carry the bound they sit at.
class Partition {
 public:
  Partition() = default;
  explicit Partition(Index n, VarStatus fill = VarStatus::AtLower);
  static Partition from_basis(Index n, const std::vector<Index>& basic);

  Index size() const { return static_cast<Index>(status_.size()); }
  VarStatus status(Index i) const { return status_[static_cast<size_t>(i)]; }
  void set(Index i, VarStatus s);

  bool is_basic(Index i) const { return status(i) == VarStatus::Basic; }
  bool is_nonbasic(Index i) const;

  // Removes l from B or N; remembers where it came from.
  void free_index(Index l);
  std::optional<Index> freed() const { return freed_; }
  VarStatus freed_from() const { return freed_from_; }

  std::vector<Index> basic() const;
  std::vector<Index> nonbasic() const;

  bool operator==(const Partition& o) const {
    return status_ == o.status_ && freed_ == o.freed_;
  }

 private:
  std::vector<VarStatus> status_;
  std::optional<Index> freed_;
  VarStatus freed_from_ = VarStatus::Basic;
};

struct Iterate {
  Vector x, y, z;
};

// A search direction. dx vanishes on N and dz on B; l is the freed index.
struct Direction {
  Vector dx, dy, dz;
  Index l = -1;

  double dx_l() const { return dx[l]; }
  double dz_l() const { return dz[l]; }
  Direction operator-() const { return {-dx, -dy, -dz, l}; }
};

struct OptimalityReport {
  double stationarity_residual = 0;
  double equality_residual = 0;
  double worst_primal_violation = 0;
  double worst_dual_violation = 0;
  // Normalized: for every i either the bound gap or the reduced cost is
  // within tolerance. Values ≤ 1 pass.
  double complementarity = 0;
  bool optimal = false;
};

double primal_objective(const QpProblem& p, const Shifts& s, const Iterate& it);
double dual_objective(const QpProblem& p, const Shifts& s, const Iterate& it);

// f_P − f_D at any point satisfying the optimality conditions. Reduces to
// −qᵀr when every variable only has a lower bound.
double shift_gap(const QpProblem& p, const Shifts& s);

std::pair<Vector, Vector> residuals(const QpProblem& p, const Iterate& it);

OptimalityReport check_optimality(const QpProblem& p, const Shifts& s, const Iterate& it,
                                  double eps_fea, double eps_opt);

// Dual sign violation of variable i given w = z_i + r_i and where x_i sits.
// Fixed variables (equal effective bounds) accept either sign.
double dual_sign_violation(const QpProblem& p, const Shifts& s, Index i, VarStatus st, double w);

}  // namespace pdqp
