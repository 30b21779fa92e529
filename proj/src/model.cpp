#include "pdqp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdqp {

namespace {

// Pivoted Cholesky used only as a semidefiniteness test. Pivots may dip to
// -rel·maxdiag; once the largest remaining pivot is negligible, the rest of
// the Schur complement must be negligible too.
bool is_psd(const Matrix& S0, double rel) {
  const Index n = S0.rows();
  if (n == 0) return true;
  Matrix S = S0;
  const double maxdiag = S.diagonal().cwiseAbs().maxCoeff();
  const double tol = rel * maxdiag;
  std::vector<Index> rest(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) rest[static_cast<size_t>(i)] = i;
  while (!rest.empty()) {
    size_t best = 0;
    for (size_t t = 1; t < rest.size(); ++t)
      if (S(rest[t], rest[t]) > S(rest[best], rest[best])) best = t;
    const Index k = rest[best];
    const double d = S(k, k);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
    if (d <= tol) {
      for (Index i : rest) {
        if (S(i, i) < -tol) return false;
        for (Index j : rest)
          if (i != j && std::abs(S(i, j)) > 100 * tol) return false;
        if (std::abs(S(i, k)) > 100 * tol) return false;
      }
      return d >= -tol;
    }
    for (Index i : rest)
      for (Index j : rest) S(i, j) -= S(i, k) * S(k, j) / d;
  }
  return true;
}

void check_finite(const Matrix& X, const char* what) {
  if (!X.allFinite()) throw ModelError(std::string(what) + " has non-finite entries");
}

}  // namespace

QpProblem::QpProblem(Matrix H, Matrix M, Matrix A, Vector b, Vector c)
    : QpProblem(std::move(H), std::move(M), std::move(A), std::move(b), c,
                Vector::Zero(c.size()), Vector::Constant(c.size(), kInf)) {}

QpProblem::QpProblem(Matrix H, Matrix M, Matrix A, Vector b, Vector c, Vector lower,
                     Vector upper)
    : b_(std::move(b)), c_(std::move(c)), lower_(std::move(lower)), upper_(std::move(upper)) {
  const Index n = c_.size(), m = b_.size();
  if (H.rows() != n || H.cols() != n) throw ModelError("H must be n x n");
  if (M.rows() != m || M.cols() != m) throw ModelError("M must be m x m");
  if (A.rows() != m || A.cols() != n) throw ModelError("A must be m x n");
  if (lower_.size() != n || upper_.size() != n) throw ModelError("bounds must have length n");
  check_finite(H, "H");
  check_finite(M, "M");
  check_finite(A, "A");
  check_finite(b_, "b");
  check_finite(c_, "c");
  for (Index i = 0; i < n; ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i])) throw ModelError("NaN bound");
    if (lower_[i] == kInf || upper_[i] == -kInf)
      throw ModelError("bound of variable " + std::to_string(i + 1) + " excludes every value");
    if (lower_[i] > upper_[i])
      throw ModelError("lower > upper for variable " + std::to_string(i + 1));
  }
  // The lower triangle is authoritative.
  H_ = H.selfadjointView<Eigen::Lower>();
  M_ = M.selfadjointView<Eigen::Lower>();
  A_ = std::move(A);
  if (!is_psd(H_, 1e-10)) throw ModelError("H is not positive semidefinite");
  if (!is_psd(M_, 1e-10)) throw ModelError("M is not positive semidefinite");
  if (m > 0) {
    Matrix AM(n + m, m);
    AM << A_.transpose(), M_.transpose();
    Eigen::ColPivHouseholderQR<Matrix> qr(AM);
    qr.setThreshold(1e-10);
    if (qr.rank() < m)
      throw ModelError("[A M] is rank deficient: rank " + std::to_string(qr.rank()) + " < m = " +
                       std::to_string(m));
  }
}

Shifts Shifts::zero(Index n) {
  return {Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
}

double lower_eff(const QpProblem& p, const Shifts& s, Index i) {
  return p.has_lower(i) ? p.lower()[i] - s.q[i] : -kInf;
}

double upper_eff(const QpProblem& p, const Shifts& s, Index i) {
  return p.has_upper(i) ? p.upper()[i] + s.q_upper[i] : kInf;
}

Partition::Partition(Index n, VarStatus fill) : status_(static_cast<size_t>(n), fill) {}

Partition Partition::from_basis(Index n, const std::vector<Index>& basic) {
  Partition part(n);
  for (Index i : basic) part.set(i, VarStatus::Basic);
  return part;
}

void Partition::set(Index i, VarStatus s) {
  if (freed_ == i) freed_.reset();
  if (s == VarStatus::Freed)
    throw std::logic_error("use free_index to free a variable");
  status_[static_cast<size_t>(i)] = s;
}

bool Partition::is_nonbasic(Index i) const {
  const VarStatus s = status(i);
  return s == VarStatus::AtLower || s == VarStatus::AtUpper || s == VarStatus::TempFixed;
}

void Partition::free_index(Index l) {
  if (freed_) throw std::logic_error("a variable is already freed");
  freed_from_ = status(l);
  status_[static_cast<size_t>(l)] = VarStatus::Freed;
  freed_ = l;
}

std::vector<Index> Partition::basic() const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (is_basic(i)) out.push_back(i);
  return out;
}

std::vector<Index> Partition::nonbasic() const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (is_nonbasic(i)) out.push_back(i);
  return out;
}

double primal_objective(const QpProblem& p, const Shifts& s, const Iterate& it) {
  return 0.5 * it.x.dot(p.H() * it.x) + 0.5 * it.y.dot(p.M() * it.y) + p.c().dot(it.x) +
         s.r.dot(it.x);
}

namespace {

// The bound value that pairs with reduced cost w in the dual objective.
double dual_bound(const QpProblem& p, const Shifts& s, Index i, double w, double x) {
  const bool lo = p.has_lower(i), up = p.has_upper(i);
  if (w > 0) return lo ? lower_eff(p, s, i) : (up ? upper_eff(p, s, i) : x);
  return up ? upper_eff(p, s, i) : (lo ? lower_eff(p, s, i) : x);
}

double reference_bound(const QpProblem& p, const Shifts& s, Index i) {
  if (p.has_lower(i)) return lower_eff(p, s, i);
  if (p.has_upper(i)) return upper_eff(p, s, i);
  return 0.0;
}

}  // namespace

double dual_objective(const QpProblem& p, const Shifts& s, const Iterate& it) {
  double f = -0.5 * it.x.dot(p.H() * it.x) - 0.5 * it.y.dot(p.M() * it.y) + p.b().dot(it.y);
  for (Index i = 0; i < p.n(); ++i) {
    const double w = it.z[i] + s.r[i];
    if (w != 0) f += dual_bound(p, s, i, w, it.x[i]) * w;
    f -= reference_bound(p, s, i) * s.r[i];
  }
  return f;
}

double shift_gap(const QpProblem& p, const Shifts& s) {
  double g = 0;
  for (Index i = 0; i < p.n(); ++i) g += reference_bound(p, s, i) * s.r[i];
  return g;
}

std::pair<Vector, Vector> residuals(const QpProblem& p, const Iterate& it) {
  Vector st = p.H() * it.x + p.c() - p.A().transpose() * it.y - it.z;
  Vector eq = p.A() * it.x + p.M() * it.y - p.b();
  return {std::move(st), std::move(eq)};
}

double dual_sign_violation(const QpProblem& p, const Shifts& s, Index i, VarStatus st, double w) {
  switch (st) {
    case VarStatus::AtLower:
      if (upper_eff(p, s, i) <= lower_eff(p, s, i)) return 0;
      return std::max(0.0, -w);
    case VarStatus::AtUpper:
      if (upper_eff(p, s, i) <= lower_eff(p, s, i)) return 0;
      return std::max(0.0, w);
    default:
      return std::abs(w);
  }
}

namespace {
double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
}  // namespace

OptimalityReport check_optimality(const QpProblem& p, const Shifts& s, const Iterate& it,
                                  double eps_fea, double eps_opt) {
  OptimalityReport rep;
  auto [st, eq] = residuals(p, it);
  const Vector Hx = p.H() * it.x, Aty = p.A().transpose() * it.y;
  const Vector Ax = p.A() * it.x, My = p.M() * it.y;
  rep.stationarity_residual = inf_norm(st);
  rep.equality_residual = inf_norm(eq);
  const double s_scale =
      1 + std::max({inf_norm(p.c()), inf_norm(Hx), inf_norm(Aty), inf_norm(it.z)});
  const double e_scale = 1 + std::max({inf_norm(p.b()), inf_norm(Ax), inf_norm(My)});
  bool ok = rep.stationarity_residual <= eps_opt * s_scale &&
            rep.equality_residual <= eps_fea * e_scale;

  const double ys = std::max(1.0, inf_norm(it.y));
  for (Index i = 0; i < p.n(); ++i) {
    const double lo = lower_eff(p, s, i), up = upper_eff(p, s, i), x = it.x[i];
    double pv = 0;
    if (x < lo) pv = lo - x;
    if (x > up) pv = x - up;
    rep.worst_primal_violation = std::max(rep.worst_primal_violation, pv);
    const double bnd = x < lo ? lo : up;
    if (pv > eps_fea * std::max(1.0, std::abs(bnd))) ok = false;

    const double w = it.z[i] + s.r[i];
    double dv = 0, gap = 0, gap_bnd = 0;
    const bool fixed = lo >= up;
    if (w > 0) {
      if (p.has_lower(i)) {
        gap = x - lo;
        gap_bnd = lo;
      } else {
        dv = w;
      }
    } else if (w < 0) {
      if (p.has_upper(i)) {
        gap = up - x;
        gap_bnd = up;
      } else {
        dv = -w;
      }
    }
    if (fixed) gap = std::min(std::abs(x - lo), std::abs(up - x));
    rep.worst_dual_violation = std::max(rep.worst_dual_violation, dv);
    if (dv > eps_opt * ys) ok = false;
    if (dv == 0 && w != 0) {
      const double cg = std::min(std::max(gap, 0.0) / (eps_fea * std::max(1.0, std::abs(gap_bnd))),
                                 std::abs(w) / (eps_opt * ys));
      rep.complementarity = std::max(rep.complementarity, cg);
    }
  }
  if (rep.complementarity > 1) ok = false;
  rep.optimal = ok;
  return rep;
}

}  // namespace pdqp
