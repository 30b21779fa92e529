#pragma once

// Pieces shared by the primal and dual methods. The two algorithms are
// mirrors of each other; they differ in which inequality family the ratio
// test watches and which quantity the freed index drives to its target.

#include "pdqp/active_set.hpp"
#include "pdqp/kkt.hpp"

namespace pdqp::detail {

struct Ratio {
  double alpha = kInf;
  Index index = -1;
  VarStatus side = VarStatus::AtLower;
};

// Ignore direction components below this (relative to the largest, floor 1e-9).
double direction_tol(const Vector& v);

// ΔxᵀHΔx + ΔyᵀMΔy. For a base direction this equals Δz_l (primal) or Δx_l
// (dual) in exact arithmetic, and its rounding error is second order in the
// direction's, so it decides "K_l singular" far more reliably than the
// computed component.
bool curvature_vanishes(const QpProblem& p, const Direction& d);

// Basic variables and the freed index against their shifted bounds.
Ratio primal_ratio(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                   const Direction& d);
// Nonbasic reduced costs z + r against zero, with the sign their bound needs.
Ratio dual_ratio(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                 const Direction& d);

void advance(Iterate& it, const Direction& d, double alpha);

// Recompute x_B, y from x_N and z_B with the factored K_B, then z_N.
void refresh(const QpProblem& p, const Partition& part, Iterate& it, const KktFactorization& fb);

double inf_norm(const Vector& v);

long subiteration_cap(const Limits& lim);

// Fills the bookkeeping parts of a trace record and hands it to the sink.
void emit_step(const TraceSink* sink, Method method, StepKind kind, const Limits& lim,
               int iteration, long subiteration, Index l, const StepResult& step,
               const Iterate& before, const Partition& part_before, const Direction& dir,
               const QpProblem& p, const Shifts& s, const Iterate& after);

void emit_boundary(const TraceSink* sink, Method method, const Limits& lim, int iteration,
                   const Partition& part, const Iterate& it);

}  // namespace pdqp::detail
