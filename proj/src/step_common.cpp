#include "step_common.hpp"

#include <algorithm>
#include <cmath>

namespace pdqp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::PrimalInfeasible: return "PrimalInfeasible";
    case Status::DualInfeasible: return "DualInfeasible";
    case Status::IterationLimit: return "IterationLimit";
    case Status::InvalidStart: return "InvalidStart";
  }
  return "?";
}

std::optional<Status> status_from_string(const std::string& s) {
  for (Status st : {Status::Optimal, Status::PrimalInfeasible, Status::DualInfeasible,
                    Status::IterationLimit, Status::InvalidStart})
    if (s == to_string(st)) return st;
  return std::nullopt;
}

const char* to_string(Method m) { return m == Method::Primal ? "primal" : "dual"; }

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::Base: return "base";
    case StepKind::Intermediate: return "intermediate";
    case StepKind::TemporarySwap: return "temporary-swap";
  }
  return "?";
}

namespace detail {

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double direction_tol(const Vector& v) { return 1e-9 * std::max(1.0, inf_norm(v)); }

bool curvature_vanishes(const QpProblem& p, const Direction& d) {
  const double q = d.dx.dot(p.H() * d.dx) + d.dy.dot(p.M() * d.dy);
  // Measured against the size of the KKT system and, since q = ΔxᵀΔz, the
  // step's normalization (Δx_l or Δz_l = 1).
  const double knorm = p.H().norm() + p.A().norm() + p.M().norm();
  const double scale =
      knorm * (d.dx.squaredNorm() + d.dy.squaredNorm()) + d.dx.norm() * d.dz.norm();
  return q <= 1e-12 * scale;
}

namespace {

// α = max(gap, 0) / rate over the candidates, least index on ties. Gaps in
// [−ε, 0) are slightly infeasible values and give a zero step.
template <class Candidate>
Ratio min_ratio(Index n, Candidate&& cand) {
  Ratio best;
  for (Index i = 0; i < n; ++i) {
    double gap = 0, rate = 0;
    VarStatus side = VarStatus::AtLower;
    if (!cand(i, gap, rate, side)) continue;
    const double a = std::max(gap, 0.0) / rate;
    if (a < best.alpha) best = {a, i, side};
  }
  return best;
}

}  // namespace

Ratio primal_ratio(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                   const Direction& d) {
  const double tol = direction_tol(d.dx);
  return min_ratio(p.n(), [&](Index i, double& gap, double& rate, VarStatus& side) {
    const VarStatus st = part.status(i);
    if (st != VarStatus::Basic && st != VarStatus::Freed) return false;
    const double dx = d.dx[i];
    if (dx < -tol && p.has_lower(i)) {
      gap = it.x[i] - lower_eff(p, s, i);
      rate = -dx;
      side = VarStatus::AtLower;
      return true;
    }
    if (dx > tol && p.has_upper(i)) {
      gap = upper_eff(p, s, i) - it.x[i];
      rate = dx;
      side = VarStatus::AtUpper;
      return true;
    }
    return false;
  });
}

Ratio dual_ratio(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                 const Direction& d) {
  const double tol = direction_tol(d.dz);
  return min_ratio(p.n(), [&](Index i, double& gap, double& rate, VarStatus& side) {
    const VarStatus st = part.status(i);
    if (st != VarStatus::AtLower && st != VarStatus::AtUpper) return false;
    if (upper_eff(p, s, i) <= lower_eff(p, s, i)) return false;  // fixed: any sign
    const double w = it.z[i] + s.r[i], dz = d.dz[i];
    side = VarStatus::Basic;
    if (st == VarStatus::AtLower && dz < -tol) {
      gap = w;
      rate = -dz;
      return true;
    }
    if (st == VarStatus::AtUpper && dz > tol) {
      gap = -w;
      rate = dz;
      return true;
    }
    return false;
  });
}

void advance(Iterate& it, const Direction& d, double alpha) {
  if (alpha == 0) return;
  it.x += alpha * d.dx;
  it.y += alpha * d.dy;
  it.z += alpha * d.dz;
}

void refresh(const QpProblem& p, const Partition& part, Iterate& it, const KktFactorization& fb) {
  const auto& B = fb.basis();
  const Index nb = static_cast<Index>(B.size()), m = p.m();
  Vector xN = it.x;
  for (Index i : B) xN[i] = 0;
  const Vector HxN = p.H() * xN;
  Vector rhs(nb + m);
  for (Index t = 0; t < nb; ++t) {
    const Index i = B[static_cast<size_t>(t)];
    rhs[t] = -p.c()[i] - HxN[i] + it.z[i];
  }
  rhs.tail(m) = p.b() - p.A() * xN;
  const Vector w = fb.solve(rhs);
  for (Index t = 0; t < nb; ++t) it.x[B[static_cast<size_t>(t)]] = w[t];
  it.y = -w.tail(m);
  const Vector g = p.H() * it.x + p.c() - p.A().transpose() * it.y;
  for (Index i = 0; i < p.n(); ++i)
    if (!part.is_basic(i)) it.z[i] = g[i];
}

long subiteration_cap(const Limits& lim) {
  return lim.max_subiterations > 0 ? lim.max_subiterations
                                   : 20L * static_cast<long>(lim.max_iterations) + 1000;
}

void emit_step(const TraceSink* sink, Method method, StepKind kind, const Limits& lim,
               int iteration, long subiteration, Index l, const StepResult& step,
               const Iterate& before, const Partition& part_before, const Direction& dir,
               const QpProblem& p, const Shifts& s, const Iterate& after) {
  if (!sink || !sink->on_step) return;
  TraceRecord rec;
  rec.method = method;
  rec.kind = kind;
  rec.stage = lim.stage;
  rec.iteration = iteration;
  rec.subiteration = subiteration;
  rec.l = l;
  rec.step = step;
  rec.f_primal = primal_objective(p, s, after);
  rec.f_dual = dual_objective(p, s, after);
  auto [st, eq] = residuals(p, after);
  rec.stationarity = inf_norm(st);
  rec.equality = inf_norm(eq);
  rec.before = before;
  rec.partition = part_before;
  rec.direction = dir;
  rec.problem = &p;
  rec.shifts = &s;
  sink->on_step(rec);
}

void emit_boundary(const TraceSink* sink, Method method, const Limits& lim, int iteration,
                   const Partition& part, const Iterate& it) {
  if (!sink || !sink->on_boundary) return;
  sink->on_boundary(BoundaryRecord{method, lim.stage, iteration, part, it});
}

}  // namespace detail
}  // namespace pdqp
