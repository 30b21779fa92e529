#pragma once

#include "pdqp/active_set.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdqp {

// min ½xᵀĤx + cᵀx  s.t.  lower ≤ (x; Âx) ≤ upper, infinite entries allowed.
struct GeneralQp {
  Matrix Hhat;
  Matrix Ahat;
  Vector c;
  Vector lower;  // n + m entries: variables first, then rows
  Vector upper;
  std::string name;

  Index n() const { return c.size(); }
  Index m() const { return Ahat.rows(); }
};

// Throws ModelError on inconsistent dimensions or bounds.
void validate(const GeneralQp& g);

// Âx − s = 0 with bounds on (x, s): A = [Â −I], M = 0, b = 0.
struct StandardForm {
  QpProblem problem;
  Index n_orig = 0;
  Index m_orig = 0;

  Vector x(const Iterate& it) const { return it.x.head(n_orig); }
  Vector row_activity(const Iterate& it) const { return it.x.tail(m_orig); }
  Vector row_duals(const Iterate& it) const { return it.y; }
  Vector bound_duals(const Iterate& it) const { return it.z.head(n_orig); }
};

StandardForm standardize(const GeneralQp& g);

// A free variable outside the initial basis, fixed at xbar with its reduced
// cost zbar recorded.
struct TemporaryBound {
  Index j = -1;
  double xbar = 0;
  double zbar = 0;
  bool released = false;  // entered B
};

struct TemporaryBoundRegistry {
  std::vector<TemporaryBound> entries;

  bool empty() const { return entries.empty(); }
};

// Registers every TempFixed variable of the partition (x̄ = 0, z̄ from it).
TemporaryBoundRegistry register_temporary_bounds(const Partition& part, const Iterate& it);

// Bookkeeping after a stage: marks entries that entered B and checks that a
// dual stage left every still-fixed z_j unchanged.
void temporary_bound_pass(TemporaryBoundRegistry& reg, Method stage, const Partition& part,
                          const Iterate& it);

// Minimal shifts making the partition's basic solution optimal for the
// shifted pair. Nonbasic x sit at their bound (0 if temporarily fixed).
std::pair<Shifts, Iterate> init_shifts(const QpProblem& p, const Partition& part);

// Nonbasic reduced costs have the right sign for r = 0 and no temporarily
// fixed variable carries a reduced cost.
bool dual_feasible_start(const QpProblem& p, const Partition& part, const Iterate& it,
                         double eps_fea);

enum class Strategy { Auto, PrimalFirst, DualFirst, PrimalOnly, DualOnly };

const char* to_string(Strategy s);
std::optional<Strategy> strategy_from_string(const std::string& s);

struct SolveConfig {
  Strategy strategy = Strategy::Auto;
  double eps_fea = 1e-6;
  double eps_opt = 1e-6;
  int max_iterations = 100000;
  int bland_after = 50;
  // Start from this basis instead of the discovered one. Must be second-order
  // consistent.
  std::optional<std::vector<Index>> initial_basis;
  const TraceSink* sink = nullptr;
};

struct StageReport {
  int stage = 0;
  Method method = Method::Primal;
  Shifts shifts;
  Status status = Status::Optimal;
  int iterations = 0;
  long subiterations = 0;
  Iterate iterate;
  Partition partition;
};

struct PdqpSolution {
  Status status = Status::Optimal;
  // Original coordinates (standardized ones when the input was a QpProblem).
  Vector x, y, z;
  double objective = 0;
  Strategy strategy = Strategy::Auto;  // the strategy actually run
  std::vector<StageReport> stage_log;
  // Standard-form data.
  Iterate iterate;
  Partition partition;
  Partition initial_partition;
  Shifts initial_shifts;
  TemporaryBoundRegistry registry;
  std::optional<Direction> certificate;

  int iterations() const;
  long subiterations() const;
  int stage_iterations(int stage) const;
};

PdqpSolution solve_pdqp(const GeneralQp& g, const SolveConfig& cfg = {});
// For problems already in the form handled by the methods (M may be nonzero).
PdqpSolution solve_pdqp(const QpProblem& p, const SolveConfig& cfg = {});

}  // namespace pdqp
