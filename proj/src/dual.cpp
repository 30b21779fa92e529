#include "pdqp/dual.hpp"

#include "pdqp/kkt.hpp"
#include "step_common.hpp"

#include <cmath>

namespace pdqp {

namespace {

struct Target {
  double sign = 0;  // +1: x_l rises to its lower bound, −1: falls to its upper bound
  double violation = 0;
};

double bound_tol(double eps, double b) { return eps * std::max(1.0, std::abs(b)); }

// Where x_i has to go, judged from its status; sign 0 if nowhere.
Target dual_target(const QpProblem& p, const Shifts& s, VarStatus st, Index i, double x,
                   double eps_fea) {
  const double lo = lower_eff(p, s, i), up = upper_eff(p, s, i);
  const bool lo_ok = st == VarStatus::Basic || st == VarStatus::AtLower;
  const bool up_ok = st == VarStatus::Basic || st == VarStatus::AtUpper;
  if (lo_ok && p.has_lower(i) && x < lo - bound_tol(eps_fea, lo)) return {1.0, lo - x};
  if (up_ok && p.has_upper(i) && x > up + bound_tol(eps_fea, up)) return {-1.0, x - up};
  return {};
}

double target_bound(const QpProblem& p, const Shifts& s, Index l, double sign) {
  return sign > 0 ? lower_eff(p, s, l) : upper_eff(p, s, l);
}

// First temporarily fixed j whose reduced cost would move, if any.
Index temporary_to_swap(const Partition& part, const Direction& dir) {
  const double tol = detail::direction_tol(dir.dz);
  for (Index j = 0; j < part.size(); ++j)
    if (part.status(j) == VarStatus::TempFixed && std::abs(dir.dz[j]) > tol) return j;
  return -1;
}

StepResult temporary_swap(const Shifts& s, Partition& part, Iterate& it, Index j) {
  StepResult res;
  res.alpha = 0;
  res.alpha_max = 0;
  res.blocking = j;
  part.set(j, VarStatus::Basic);
  it.z[j] = -s.r[j];
  return res;
}

StepResult take_step(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it, Index l,
                     double sign, const Direction& dir, bool base) {
  const double bound = target_bound(p, s, l, sign);
  const double gap = std::max(0.0, sign * (bound - it.x[l]));
  const double dxl = dir.dx[l];
  StepResult res;
  if (base) {
    const bool zero = detail::curvature_vanishes(p, dir) || dxl * sign <= 0;
    res.alpha_star = zero ? kInf : gap / std::abs(dxl);
  } else {
    res.alpha_star = gap / std::abs(dxl);
  }
  const detail::Ratio rt = detail::dual_ratio(p, s, part, it, dir);
  res.alpha_max = rt.alpha;
  res.alpha = std::min(res.alpha_star, res.alpha_max);
  if (res.unbounded()) return res;

  detail::advance(it, dir, res.alpha);
  if (res.alpha_star <= res.alpha_max) {
    res.hit_target = true;
    it.x[l] = bound;
    part.set(l, sign > 0 ? VarStatus::AtLower : VarStatus::AtUpper);
  } else {
    const Index k = rt.index;
    res.blocking = k;
    it.z[k] = -s.r[k];
    part.set(k, VarStatus::Basic);
  }
  return res;
}

double entry_sign(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                  Index l) {
  const Target t = dual_target(p, s, part.freed_from(), l, it.x[l], 0.0);
  if (t.sign == 0) throw PreconditionError("dual step entered with x_l at or within its bounds");
  return t.sign;
}

}  // namespace

StepResult dual_base(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it, Index l,
                     const Limits& /*lim*/) {
  if (part.freed() != l) part.free_index(l);
  const double sign = entry_sign(p, s, part, it, l);
  Direction dir = solve_intermediate_primal(p, part, l);
  if (sign < 0) dir = -dir;
  if (const Index j = temporary_to_swap(part, dir); j >= 0) return temporary_swap(s, part, it, j);
  return take_step(p, s, part, it, l, sign, dir, true);
}

StepResult dual_intermediate(const QpProblem& p, const Shifts& s, Partition& part, Iterate& it,
                             Index l, const Limits& /*lim*/) {
  if (part.freed() != l) throw PreconditionError("dual intermediate needs l freed");
  const double sign = entry_sign(p, s, part, it, l);
  const auto fb = require_factor(factor_kb(p, part), "dual intermediate subiteration");
  Direction dir = solve_base_primal(p, part, fb, l);
  if (sign < 0) dir = -dir;
  if (const Index j = temporary_to_swap(part, dir); j >= 0) return temporary_swap(s, part, it, j);
  return take_step(p, s, part, it, l, sign, dir, false);
}

bool dual_start_ok(const QpProblem& p, const Shifts& s, const Partition& part, const Iterate& it,
                   double eps_fea, double eps_opt) {
  if (part.freed()) return false;
  const double tol = eps_opt * std::max(1.0, detail::inf_norm(it.y));
  for (Index i = 0; i < p.n(); ++i) {
    const VarStatus st = part.status(i);
    const double w = it.z[i] + s.r[i];
    if (dual_sign_violation(p, s, i, st, w) > tol) return false;
    const double lo = lower_eff(p, s, i), up = upper_eff(p, s, i), x = it.x[i];
    if (st == VarStatus::AtLower && x > lo + bound_tol(eps_fea, lo)) return false;
    if (st == VarStatus::AtUpper && x < up - bound_tol(eps_fea, up)) return false;
  }
  return true;
}

DualOutcome solve_dual(const QpProblem& p, const Shifts& s, Iterate it, Partition part,
                       const Limits& lim, const TraceSink* sink) {
  if (!dual_start_ok(p, s, part, it, lim.eps_fea, lim.eps_opt))
    throw PreconditionError("dual method needs a dual feasible start");
  DualOutcome out;
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
    detail::emit_step(sink, Method::Dual, kind, lim, out.iterations, out.subiterations, l, r,
                      before, pb, dir, p, s, it);
  };

  for (;;) {
    auto fb = require_factor(factor_kb(p, part), "dual iteration boundary");
    if (lim.refresh) detail::refresh(p, part, it, fb);
    detail::emit_boundary(sink, Method::Dual, lim, out.iterations, part, it);

    // Nonbasic x off their bounds (left by a relaxed start) go first. Until
    // they are cleared an unbounded base step is not an infeasibility proof.
    Index l = -1;
    double worst = 0, sign = 0;
    for (const bool relaxed : {true, false}) {
      for (Index i = 0; i < p.n(); ++i) {
        if (part.is_basic(i) == relaxed) continue;
        const Target t = dual_target(p, s, part.status(i), i, it.x[i], lim.eps_fea);
        if (t.sign == 0) continue;
        if (out.least_index_mode) {
          l = i, sign = t.sign;
          break;
        }
        if (t.violation > worst) worst = t.violation, l = i, sign = t.sign;
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
    // K_B is unchanged when l leaves N, so the boundary factor stays valid.
    std::optional<KktFactorization> cur;
    if (!from_basic) cur = std::move(fb);

    if (from_basic) {
      Direction dir = solve_intermediate_primal(p, part, l);
      if (sign < 0) dir = -dir;
      const Iterate before = it;
      const Partition pb = part;
      if (const Index j = temporary_to_swap(part, dir); j >= 0) {
        record(StepKind::TemporarySwap, l, temporary_swap(s, part, it, j), before, pb, dir);
      } else {
        const StepResult r = take_step(p, s, part, it, l, sign, dir, true);
        record(StepKind::Base, l, r, before, pb, dir);
        if (r.unbounded()) {
          out.status = Status::PrimalInfeasible;
          out.certificate = dir;
          break;
        }
      }
    }
    while (part.freed()) {
      if (out.subiterations >= cap) break;
      if (!cur) cur = require_factor(factor_kb(p, part), "dual intermediate subiteration");
      Direction dir = solve_base_primal(p, part, *cur, l);
      if (sign < 0) dir = -dir;
      const Iterate before = it;
      const Partition pb = part;
      if (const Index j = temporary_to_swap(part, dir); j >= 0) {
        record(StepKind::TemporarySwap, l, temporary_swap(s, part, it, j), before, pb, dir);
      } else {
        const StepResult r = take_step(p, s, part, it, l, sign, dir, false);
        record(StepKind::Intermediate, l, r, before, pb, dir);
      }
      cur.reset();
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
