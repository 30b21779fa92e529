#pragma once

#include "pdqp/active_set.hpp"

namespace pdqp {

// One base subiteration of the dual method: l (basic with x_l outside its
// shifted bounds, or nonbasic beyond its bound) is freed and z_l moves with
// Δz_l = ±1. An unbounded step returns alpha = +inf: the primal is infeasible.
// A temporarily fixed variable with Δz_j ≠ 0 is moved to B with a zero step
// instead (StepResult.blocking = j, alpha = 0).
StepResult dual_base(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it, Index l,
                     const Limits& lim = {});

// One intermediate subiteration (Δx_l fixed), l already freed.
StepResult dual_intermediate(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it,
                             Index l, const Limits& lim = {});

// Relaxed start check: z + r has the sign each nonbasic bound needs and is
// zero on B; nonbasic x sit at or beyond their bound.
bool dual_start_ok(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                   double eps_fea, double eps_opt);

// The dual active-set method from a relaxed start. Throws
// PreconditionError if the start is not dual feasible.
DualOutcome solve_dual(const QpProblem& p, const Shifts& s, Iterate it, Partition part,
                       const Limits& lim = {}, const TraceSink* sink = nullptr);

}  // namespace pdqp
