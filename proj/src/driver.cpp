#include "pdqp/driver.hpp"

#include "pdqp/dual.hpp"
#include "pdqp/kkt.hpp"
#include "pdqp/primal.hpp"
#include "step_common.hpp"

#include <cmath>
#include <string>

namespace pdqp {

void validate(const GeneralQp& g) {
  const Index n = g.n(), m = g.m();
  if (g.Hhat.rows() != n || g.Hhat.cols() != n) throw ModelError("Hhat must be n x n");
  if (g.Ahat.cols() != n && m > 0) throw ModelError("Ahat must have n columns");
  if (g.lower.size() != n + m || g.upper.size() != n + m)
    throw ModelError("bounds must have n + m entries");
  for (Index i = 0; i < n + m; ++i) {
    if (std::isnan(g.lower[i]) || std::isnan(g.upper[i])) throw ModelError("NaN bound");
    if (g.lower[i] > g.upper[i])
      throw ModelError("inconsistent bounds: lower > upper at entry " + std::to_string(i + 1));
    if (g.lower[i] == kInf || g.upper[i] == -kInf)
      throw ModelError("bound at entry " + std::to_string(i + 1) + " excludes every value");
  }
}

StandardForm standardize(const GeneralQp& g) {
  validate(g);
  const Index n = g.n(), m = g.m();
  Matrix H = Matrix::Zero(n + m, n + m);
  H.topLeftCorner(n, n) = g.Hhat;
  Matrix A(m, n + m);
  if (m > 0) A << g.Ahat, -Matrix::Identity(m, m);
  Vector c = Vector::Zero(n + m);
  c.head(n) = g.c;
  return {QpProblem(std::move(H), Matrix::Zero(m, m), std::move(A), Vector::Zero(m),
                    std::move(c), g.lower, g.upper),
          n, m};
}

TemporaryBoundRegistry register_temporary_bounds(const Partition& part, const Iterate& it) {
  TemporaryBoundRegistry reg;
  for (Index j = 0; j < part.size(); ++j)
    if (part.status(j) == VarStatus::TempFixed) reg.entries.push_back({j, it.x[j], it.z[j], false});
  return reg;
}

void temporary_bound_pass(TemporaryBoundRegistry& reg, Method stage, const Partition& part,
                          const Iterate& it) {
  for (auto& e : reg.entries) {
    if (part.status(e.j) == VarStatus::Basic) {
      e.released = true;
      continue;
    }
    if (part.status(e.j) != VarStatus::TempFixed)
      throw InternalError("temporarily fixed variable left the registry state");
    if (it.x[e.j] != e.xbar) throw InternalError("temporarily fixed variable moved");
    if (stage == Method::Dual && std::abs(it.z[e.j] - e.zbar) > 1e-8 * (1 + std::abs(e.zbar)))
      throw InternalError("dual stage changed the reduced cost of a temporary bound");
    e.zbar = it.z[e.j];
  }
}

std::pair<Shifts, Iterate> init_shifts(const QpProblem& p, const Partition& part) {
  const Index n = p.n();
  Iterate it{Vector::Zero(n), Vector::Zero(p.m()), Vector::Zero(n)};
  for (Index i = 0; i < n; ++i) {
    switch (part.status(i)) {
      case VarStatus::AtLower: it.x[i] = p.lower()[i]; break;
      case VarStatus::AtUpper: it.x[i] = p.upper()[i]; break;
      default: break;
    }
  }
  const auto fb = require_factor(factor_kb(p, part), "initial basis");
  detail::refresh(p, part, it, fb);

  Shifts s = Shifts::zero(n);
  for (Index i = 0; i < n; ++i) {
    const double x = it.x[i], z = it.z[i];
    const bool fixed = p.has_lower(i) && p.lower()[i] == p.upper()[i];
    switch (part.status(i)) {
      case VarStatus::Basic:
        if (p.has_lower(i)) s.q[i] = std::max(p.lower()[i] - x, 0.0);
        if (p.has_upper(i)) s.q_upper[i] = std::max(x - p.upper()[i], 0.0);
        break;
      case VarStatus::AtLower:
        if (!fixed) s.r[i] = std::max(-z, 0.0);
        break;
      case VarStatus::AtUpper:
        if (!fixed) s.r[i] = std::min(-z, 0.0);
        break;
      case VarStatus::TempFixed:
        s.r[i] = -z;
        break;
      case VarStatus::Freed:
        throw PreconditionError("init_shifts needs an iteration-boundary partition");
    }
  }
  return {std::move(s), std::move(it)};
}

bool dual_feasible_start(const QpProblem& p, const Partition& part, const Iterate& it,
                         double eps_fea) {
  const double tol = eps_fea * std::max(1.0, detail::inf_norm(it.y));
  const Shifts zero = Shifts::zero(p.n());
  for (Index i = 0; i < p.n(); ++i) {
    const VarStatus st = part.status(i);
    if (st == VarStatus::Basic) continue;
    if (dual_sign_violation(p, zero, i, st, it.z[i]) > tol) return false;
  }
  return true;
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::PrimalFirst: return "primal-first";
    case Strategy::DualFirst: return "dual-first";
    case Strategy::PrimalOnly: return "primal-only";
    case Strategy::DualOnly: return "dual-only";
  }
  return "?";
}

std::optional<Strategy> strategy_from_string(const std::string& s) {
  for (Strategy st : {Strategy::Auto, Strategy::PrimalFirst, Strategy::DualFirst,
                      Strategy::PrimalOnly, Strategy::DualOnly})
    if (s == to_string(st)) return st;
  return std::nullopt;
}

int PdqpSolution::iterations() const {
  int t = 0;
  for (const auto& st : stage_log) t += st.iterations;
  return t;
}

long PdqpSolution::subiterations() const {
  long t = 0;
  for (const auto& st : stage_log) t += st.subiterations;
  return t;
}

int PdqpSolution::stage_iterations(int stage) const {
  for (const auto& st : stage_log)
    if (st.stage == stage) return st.iterations;
  return 0;
}

namespace {

Partition initial_partition(const QpProblem& p, const SolveConfig& cfg) {
  if (!cfg.initial_basis) return find_soc_basis(p).partition;
  Partition part(p.n());
  for (Index i = 0; i < p.n(); ++i)
    part.set(i, p.has_lower(i)   ? VarStatus::AtLower
                : p.has_upper(i) ? VarStatus::AtUpper
                                 : VarStatus::TempFixed);
  for (Index i : *cfg.initial_basis) {
    if (i < 0 || i >= p.n()) throw ModelError("initial basis index out of range");
    part.set(i, VarStatus::Basic);
  }
  return part;
}

PdqpSolution solve_standard(const QpProblem& p, const SolveConfig& cfg) {
  PdqpSolution sol;
  Partition part = initial_partition(p, cfg);
  sol.initial_partition = part;
  auto [s0, it] = init_shifts(p, part);
  sol.initial_shifts = s0;
  sol.registry = register_temporary_bounds(part, it);

  Strategy strategy = cfg.strategy;
  if (strategy == Strategy::Auto)
    strategy = dual_feasible_start(p, part, it, cfg.eps_fea) ? Strategy::DualFirst
                                                             : Strategy::PrimalFirst;
  sol.strategy = strategy;

  const Index n = p.n();
  const Shifts zero = Shifts::zero(n);
  int used = 0;

  auto run_stage = [&](int stage, Method method, const Shifts& s) -> Status {
    Limits lim;
    lim.eps_fea = cfg.eps_fea;
    lim.eps_opt = cfg.eps_opt;
    lim.max_iterations = std::max(0, cfg.max_iterations - used);
    lim.bland_after = cfg.bland_after;
    lim.stage = stage;
    const bool only = strategy == Strategy::PrimalOnly || strategy == Strategy::DualOnly;
    const bool ok = method == Method::Primal
                        ? primal_start_ok(p, s, part, it, cfg.eps_fea)
                        : dual_start_ok(p, s, part, it, cfg.eps_fea, cfg.eps_opt);
    if (!ok) {
      if (only) return Status::InvalidStart;
      throw InternalError(std::string("stage ") + std::to_string(stage) +
                          " start violates the " + to_string(method) + " start conditions");
    }
    MethodOutcome out = method == Method::Primal ? solve_primal(p, s, it, part, lim, cfg.sink)
                                                 : solve_dual(p, s, it, part, lim, cfg.sink);
    used += out.iterations;
    it = out.iterate;
    part = out.partition;
    if (out.certificate) sol.certificate = out.certificate;
    sol.stage_log.push_back(
        {stage, method, s, out.status, out.iterations, out.subiterations, it, part});
    if (out.status == Status::Optimal) temporary_bound_pass(sol.registry, method, part, it);
    return out.status;
  };

  Shifts first = zero;
  Method m1 = Method::Primal, m2 = Method::Dual;
  switch (strategy) {
    case Strategy::PrimalFirst:
      first.q = s0.q;
      first.q_upper = s0.q_upper;
      break;
    case Strategy::DualFirst:
      first.r = s0.r;
      m1 = Method::Dual;
      m2 = Method::Primal;
      break;
    case Strategy::PrimalOnly:
      break;
    case Strategy::DualOnly:
      m1 = Method::Dual;
      break;
    case Strategy::Auto:
      break;
  }
  Status status = run_stage(1, m1, first);
  if (status == Status::Optimal &&
      (strategy == Strategy::PrimalFirst || strategy == Strategy::DualFirst))
    status = run_stage(2, m2, zero);

  sol.status = status;
  sol.iterate = it;
  sol.partition = part;
  sol.x = it.x;
  sol.y = it.y;
  sol.z = it.z;
  sol.objective = primal_objective(p, zero, it);
  return sol;
}

}  // namespace

PdqpSolution solve_pdqp(const QpProblem& p, const SolveConfig& cfg) {
  return solve_standard(p, cfg);
}

PdqpSolution solve_pdqp(const GeneralQp& g, const SolveConfig& cfg) {
  const StandardForm sf = standardize(g);
  PdqpSolution sol = solve_standard(sf.problem, cfg);
  sol.x = sf.x(sol.iterate);
  sol.y = sf.row_duals(sol.iterate);
  sol.z = sf.bound_duals(sol.iterate);
  sol.objective = 0.5 * sol.x.dot(g.Hhat * sol.x) + g.c.dot(sol.x);
  return sol;
}

}  // namespace pdqp
