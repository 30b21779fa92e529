#pragma once

#include "pdqp/ldl.hpp"
#include "pdqp/model.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace pdqp {

// Relative pivot tolerance; the absolute tolerance is this times ‖K‖∞.
inline constexpr double kPivotTol = 1e-11;

// K_B = [H_BB A_Bᵀ; A_B −M], unknowns ordered (x_B, −y).
Matrix assemble_kb(const QpProblem& p, const std::vector<Index>& basis);
// K_l: K_B bordered by the freed index l, unknowns ordered (x_l, x_B, −y).
Matrix assemble_kl(const QpProblem& p, const std::vector<Index>& basis, Index l);

class KktFactorization {
 public:
  KktFactorization(std::vector<Index> basis, Matrix K, LdlFactor ldl)
      : basis_(std::move(basis)), K_(std::move(K)), ldl_(std::move(ldl)) {}

  const std::vector<Index>& basis() const { return basis_; }
  Index dimension() const { return K_.rows(); }
  const Matrix& matrix() const { return K_; }
  // Solve with one step of iterative refinement.
  Vector solve(const Vector& rhs) const;

 private:
  std::vector<Index> basis_;
  Matrix K_;
  LdlFactor ldl_;
};

struct SingularReport {
  std::vector<Index> basis;
  Index failed_step = -1;
  double pivot_tolerance = 0;
  // Unit vector with ‖K w‖ minimal (eigenvector of the smallest |λ|).
  Vector null_vector;
  double smallest_eigenvalue = 0;
};

using KktResult = std::variant<KktFactorization, SingularReport>;

// Factor an arbitrary symmetric KKT-type matrix; `basis` is carried along.
KktResult factor_matrix(Matrix K, std::vector<Index> basis);
KktResult factor_kb(const QpProblem& p, const Partition& part);

class SingularKkt : public InternalError {
 public:
  SingularKkt(const std::string& what, SingularReport report)
      : InternalError(what), report_(std::move(report)) {}
  const SingularReport& report() const { return report_; }

 private:
  SingularReport report_;
};

// Unwraps a KktResult, throwing SingularKkt on singularity.
KktFactorization require_factor(KktResult r, const char* context);

struct SocBasisResult {
  Partition partition;
  std::vector<Index> deferred;
};

// Largest second-order consistent basis found by complete-pivoting
// elimination of the full KKT matrix. Free variables are preferred pivots.
// Nonbasic variables are placed at their lower bound when it is finite,
// else at the upper bound, else marked TempFixed.
SocBasisResult find_soc_basis(const QpProblem& p);

// Base direction: Δx_l = 1, K_B[Δx_B; −Δy] = −[h_Bl; a_l].
Direction solve_base_primal(const QpProblem& p, const Partition& part, const KktFactorization& f,
                            Index l);

// Intermediate direction: Δz_l = 1, K_l[Δx_l; Δx_B; −Δy] = [1; 0; 0].
// Throws SingularKkt when K_l is singular.
Direction solve_intermediate_primal(const QpProblem& p, const Partition& part, Index l);
// Same, with a precomputed factorization of K_l.
Direction solve_intermediate_primal(const QpProblem& p, const Partition& part, Index l,
                                    const KktFactorization& fl);

// z on N from Hx + c − Aᵀy − z = 0, in part.nonbasic() order.
Vector recover_z_nonbasic(const QpProblem& p, const Partition& part, const Iterate& it,
                          const Shifts& s);

// New factorization of K_B for the (already updated) partition.
KktFactorization refactor_after_swap(const QpProblem& p, const Partition& part,
                                     const KktFactorization& old, std::optional<Index> removed,
                                     std::optional<Index> added);

}  // namespace pdqp
