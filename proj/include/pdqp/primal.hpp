#pragma once

#include "pdqp/active_set.hpp"

namespace pdqp {

// One base subiteration. l is freed first if it is not already. The step
// moves x_l away from its bound (or in the direction that reduces |z_l + r_l|
// for a temporarily fixed or relaxed basic l). An unbounded step leaves the
// iterate untouched and returns alpha = +inf: the dual is infeasible.
StepResult primal_base(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it, Index l,
                       const Limits& lim = {});

// One intermediate subiteration (Δz_l fixed), l already freed.
StepResult primal_intermediate(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it,
                               Index l, const Limits& lim = {});

// Relaxed start check: x_B within shifted bounds, x_N at its bound.
bool primal_start_ok(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                     double eps_fea);

// The primal active-set method from a relaxed start (basic z + r may be
// nonzero). Throws PreconditionError if the start is not primal feasible.
PrimalOutcome solve_primal(const QpProblem& p, const Shifts& s, Iterate it, Partition part,
                           const Limits& lim = {}, const TraceSink* sink = nullptr);

}  // namespace pdqp
