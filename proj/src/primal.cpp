#include "pdqp/primal.hpp"

#include "pdqp/kkt.hpp"
#include "step_common.hpp"

#include <cmath>

namespace pdqp {

namespace {

// +1 when z_l + r_l < 0 (x_l must increase), −1 when it is positive.
double primal_sign(const Partition& part, double w) {
  if (w == 0) throw PreconditionError("primal step entered with z_l + r_l = 0");
  const VarStatus from = part.freed_from();
  if ((from == VarStatus::AtLower && w > 0) || (from == VarStatus::AtUpper && w < 0))
    throw PreconditionError("primal step would move x_l out of its bound");
  return w < 0 ? 1.0 : -1.0;
}

StepResult take_step(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it, Index l,
                     const Direction& dir, bool base) {
  const double w = it.z[l] + s.r[l];
  const double dzl = dir.dz[l];
  StepResult res;
  if (base) {
    const bool zero = detail::curvature_vanishes(p, dir) || dzl * w >= 0;
    res.alpha_star = zero ? kInf : -w / dzl;
  } else {
    res.alpha_star = -w / dzl;
  }
  const detail::Ratio rt = detail::primal_ratio(p, s, part, it, dir);
  res.alpha_max = rt.alpha;
  res.alpha = std::min(res.alpha_star, res.alpha_max);
  if (res.unbounded()) return res;

  detail::advance(it, dir, res.alpha);
  if (res.alpha_star <= res.alpha_max) {
    res.hit_target = true;
    it.z[l] = -s.r[l];
    part.set(l, VarStatus::Basic);
  } else {
    const Index k = rt.index;
    res.blocking = k;
    it.x[k] = rt.side == VarStatus::AtLower ? lower_eff(p, s, k) : upper_eff(p, s, k);
    part.set(k, rt.side);
  }
  return res;
}

}  // namespace

StepResult primal_base(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it, Index l,
                       const Limits& /*lim*/) {
  if (part.freed() != l) part.free_index(l);
  const double sg = primal_sign(part, it.z[l] + s.r[l]);
  const auto fb = require_factor(factor_kb(p, part), "primal base subiteration");
  Direction dir = solve_base_primal(p, part, fb, l);
  if (sg < 0) dir = -dir;
  return take_step(p, s, part, it, l, dir, true);
}

StepResult primal_intermediate(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it,
                               Index l, const Limits& /*lim*/) {
  if (part.freed() != l) throw PreconditionError("primal intermediate needs l freed");
  const double w = it.z[l] + s.r[l];
  if (w == 0) throw PreconditionError("primal step entered with z_l + r_l = 0");
  Direction dir = solve_intermediate_primal(p, part, l);
  if (w > 0) dir = -dir;
  return take_step(p, s, part, it, l, dir, false);
}

bool primal_start_ok(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                     double eps_fea) {
  if (part.freed()) return false;
  for (Index i = 0; i < p.n(); ++i) {
    const double lo = lower_eff(p, s, i), up = upper_eff(p, s, i), x = it.x[i];
    auto tol = [&](double b) { return eps_fea * std::max(1.0, std::abs(b)); };
    switch (part.status(i)) {
      case VarStatus::Basic:
        if (x < lo - tol(lo) || x > up + tol(up)) return false;
        break;
      case VarStatus::AtLower:
        if (std::abs(x - lo) > tol(lo)) return false;
        break;
      case VarStatus::AtUpper:
        if (std::abs(x - up) > tol(up)) return false;
        break;
      default:
        break;
    }
  }
  return true;
}

PrimalOutcome solve_primal(const QpProblem& p, const Shifts& s, Iterate it, Partition part,
                           const Limits& lim, const TraceSink* sink) {
  if (!primal_start_ok(p, s, part, it, lim.eps_fea))
    throw PreconditionError("primal method needs a primal feasible start");
  PrimalOutcome out;
  const long cap = detail::subiteration_cap(lim);
  int zero_run = 0;

  auto record = [&](StepKind kind, Index l, const StepResult& r, const Iterate& before,
                    const Partition& pb, const Direction& dir) {
    ++out.subiterations;
    if (r.alpha == 0) {
      ++out.degenerate_steps;
      if (++zero_run >= lim.bland_after) out.least_index_mode = true;
    } else {
      zero_run = 0;
    }
    detail::emit_step(sink, Method::Primal, kind, lim, out.iterations, out.subiterations, l, r,
                      before, pb, dir, p, s, it);
  };

  for (;;) {
    const auto fb = require_factor(factor_kb(p, part), "primal iteration boundary");
    if (lim.refresh) detail::refresh(p, part, it, fb);
    detail::emit_boundary(sink, Method::Primal, lim, out.iterations, part, it);

    const double tol = lim.eps_opt * std::max(1.0, detail::inf_norm(it.y));
    // Basic indices with z + r ≠ 0 (relaxed start) go first, mirroring the
    // dual method.
    Index l = -1;
    double worst = 0;
    for (const bool relaxed : {true, false}) {
      for (Index i = 0; i < p.n(); ++i) {
        const VarStatus st = part.status(i);
        if ((st == VarStatus::Basic) != relaxed) continue;
        const double v = dual_sign_violation(p, s, i, st, it.z[i] + s.r[i]);
        if (v <= tol) continue;
        if (out.least_index_mode) {
          l = i;
          break;
        }
        if (v > worst) worst = v, l = i;
      }
      if (l >= 0) break;
    }
    if (l < 0) {
      out.status = Status::Optimal;
      break;
    }
    if (out.iterations >= lim.max_iterations || out.subiterations >= cap) {
      out.status = Status::IterationLimit;
      break;
    }
    ++out.iterations;

    const bool from_basic = part.is_basic(l);
    part.free_index(l);
    const double sg = primal_sign(part, it.z[l] + s.r[l]);
    if (!from_basic) {
      Direction dir = solve_base_primal(p, part, fb, l);
      if (sg < 0) dir = -dir;
      const Iterate before = it;
      const Partition pb = part;
      const StepResult r = take_step(p, s, part, it, l, dir, true);
      record(StepKind::Base, l, r, before, pb, dir);
      if (r.unbounded()) {
        out.status = Status::DualInfeasible;
        out.certificate = dir;
        break;
      }
    }
    while (part.freed()) {
      if (out.subiterations >= cap) break;
      Direction dir = solve_intermediate_primal(p, part, l);
      if (sg < 0) dir = -dir;
      const Iterate before = it;
      const Partition pb = part;
      const StepResult r = take_step(p, s, part, it, l, dir, false);
      record(StepKind::Intermediate, l, r, before, pb, dir);
    }
    if (part.freed()) {
      out.status = Status::IterationLimit;
      break;
    }
  }
  out.iterate = std::move(it);
  out.partition = std::move(part);
  return out;
}

}  // namespace pdqp
