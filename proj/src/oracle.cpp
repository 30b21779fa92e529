#include "pdqp/oracle.hpp"

#include "pdqp/kkt.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pdqp {

namespace {

constexpr long kBudget = 1L << 16;
// Bases with σ_min ≤ kBasisRcond·σ_max are treated as singular.
constexpr double kBasisRcond = 1e-11;

double norm_inf(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double lo_of(const QpProblem& p, const Shifts& s, Index i) {
  return p.lower()[i] > -kInf ? p.lower()[i] - s.q[i] : -kInf;
}
double up_of(const QpProblem& p, const Shifts& s, Index i) {
  return p.upper()[i] < kInf ? p.upper()[i] + s.q_upper[i] : kInf;
}

// Per-variable states: basic (or "between bounds"), at lower, at upper.
std::vector<std::vector<VarStatus>> state_options(const QpProblem& p, const Shifts& s) {
  if (p.n() > 16) throw BudgetExceeded("enumeration limited to n <= 16");
  std::vector<std::vector<VarStatus>> opts(static_cast<size_t>(p.n()));
  long total = 1;
  for (Index i = 0; i < p.n(); ++i) {
    auto& o = opts[static_cast<size_t>(i)];
    o.push_back(VarStatus::Basic);
    const double lo = lo_of(p, s, i), up = up_of(p, s, i);
    if (lo > -kInf) o.push_back(VarStatus::AtLower);
    if (up < kInf && !(lo == up)) o.push_back(VarStatus::AtUpper);
    total *= static_cast<long>(o.size());
    if (total > kBudget) throw BudgetExceeded("more than 2^16 candidate partitions");
  }
  return opts;
}

// Calls f(states) for every combination; stops early when f returns true.
template <class F>
long for_each_assignment(const std::vector<std::vector<VarStatus>>& opts, F&& f) {
  const size_t n = opts.size();
  std::vector<size_t> digit(n, 0);
  std::vector<VarStatus> st(n);
  long count = 0;
  for (;;) {
    for (size_t i = 0; i < n; ++i) st[i] = opts[i][digit[i]];
    ++count;
    if (f(st)) return count;
    size_t i = 0;
    while (i < n && ++digit[i] == opts[i].size()) digit[i++] = 0;
    if (i == n) return count;
  }
}

Matrix own_kb(const QpProblem& p, const std::vector<Index>& B) {
  const Index nb = static_cast<Index>(B.size()), m = p.m();
  Matrix K = Matrix::Zero(nb + m, nb + m);
  for (Index a = 0; a < nb; ++a) {
    for (Index b = 0; b < nb; ++b)
      K(a, b) = p.H()(B[static_cast<size_t>(a)], B[static_cast<size_t>(b)]);
    for (Index r = 0; r < m; ++r) K(nb + r, a) = K(a, nb + r) = p.A()(r, B[static_cast<size_t>(a)]);
  }
  for (Index r = 0; r < m; ++r)
    for (Index t = 0; t < m; ++t) K(nb + r, nb + t) = -p.M()(r, t);
  return K;
}

Vector min_norm_solve(const Matrix& G, const Vector& g) {
  if (G.cols() == 0) return Vector::Zero(0);
  if (G.rows() == 0) return Vector::Zero(G.cols());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(G);
  cod.setThreshold(1e-12);
  return cod.solve(g);
}

}  // namespace

Vector gaussian_solve(Matrix K, Vector rhs) {
  const Index n = K.rows();
  const double scale = std::max(1e-300, K.cwiseAbs().maxCoeff());
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    for (Index i = k + 1; i < n; ++i)
      if (std::abs(K(i, k)) > std::abs(K(piv, k))) piv = i;
    if (std::abs(K(piv, k)) <= 1e-13 * scale) throw InternalError("gaussian_solve: singular");
    K.row(k).swap(K.row(piv));
    std::swap(rhs[k], rhs[piv]);
    for (Index i = k + 1; i < n; ++i) {
      const double f = K(i, k) / K(k, k);
      K.row(i).tail(n - k) -= f * K.row(k).tail(n - k);
      rhs[i] -= f * rhs[k];
    }
  }
  Vector x(n);
  for (Index i = n - 1; i >= 0; --i)
    x[i] = (rhs[i] - K.row(i).tail(n - i - 1).dot(x.tail(n - i - 1))) / K(i, i);
  return x;
}

Index numerical_rank(const Matrix& K, double rel) {
  if (K.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(K);
  const Vector& sv = svd.singularValues();
  const double top = sv.size() ? sv[0] : 0.0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel * top && sv[i] > 0) ++r;
  return r;
}

bool primal_set_nonempty(const QpProblem& p, const Shifts& s) {
  const auto opts = state_options(p, s);
  const Index n = p.n(), m = p.m();
  bool found = false;
  for_each_assignment(opts, [&](const std::vector<VarStatus>& st) {
    Vector x = Vector::Zero(n);
    std::vector<Index> F;
    for (Index i = 0; i < n; ++i) {
      if (st[static_cast<size_t>(i)] == VarStatus::Basic) F.push_back(i);
      else x[i] = st[static_cast<size_t>(i)] == VarStatus::AtLower ? lo_of(p, s, i) : up_of(p, s, i);
    }
    const Index nf = static_cast<Index>(F.size());
    Matrix G(m, nf + m);
    for (Index t = 0; t < nf; ++t) G.col(t) = p.A().col(F[static_cast<size_t>(t)]);
    G.rightCols(m) = p.M();
    const Vector g = p.b() - p.A() * x;
    const Vector u = min_norm_solve(G, g);
    const double res = norm_inf(G * u - g);
    if (res > 1e-9 * (1 + norm_inf(g) + norm_inf(u))) return false;
    for (Index t = 0; t < nf; ++t) {
      const Index i = F[static_cast<size_t>(t)];
      const double v = u[t], lo = lo_of(p, s, i), up = up_of(p, s, i);
      if (v < lo - 1e-9 * (1 + std::abs(lo)) || v > up + 1e-9 * (1 + std::abs(up))) return false;
    }
    found = true;
    return true;
  });
  return found;
}

bool dual_set_nonempty(const QpProblem& p, const Shifts& s) {
  const Index n = p.n(), m = p.m();
  if (n > 16) throw BudgetExceeded("enumeration limited to n <= 16");
  // Sign each w_i = (Hx − Aᵀy + c + r)_i must have: +1 (≥ 0), −1 (≤ 0),
  // 0 (= 0), 2 (free).
  std::vector<int> sign(static_cast<size_t>(n));
  std::vector<Index> constrained;
  for (Index i = 0; i < n; ++i) {
    const bool lo = lo_of(p, s, i) > -kInf, up = up_of(p, s, i) < kInf;
    int sg = 2;
    if (lo && !up) sg = 1;
    if (!lo && up) sg = -1;
    if (!lo && !up) sg = 0;
    sign[static_cast<size_t>(i)] = sg;
    if (sg == 1 || sg == -1) constrained.push_back(i);
  }
  Matrix G(n, n + m);
  G << p.H(), -p.A().transpose();
  const Vector g = p.c() + s.r;
  const size_t k = constrained.size();
  for (unsigned long mask = 0; mask < (1UL << k); ++mask) {
    std::vector<Index> Z;
    for (Index i = 0; i < n; ++i)
      if (sign[static_cast<size_t>(i)] == 0) Z.push_back(i);
    for (size_t t = 0; t < k; ++t)
      if (mask & (1UL << t)) Z.push_back(constrained[t]);
    Matrix GZ(static_cast<Index>(Z.size()), n + m);
    Vector gZ(static_cast<Index>(Z.size()));
    for (size_t t = 0; t < Z.size(); ++t) {
      GZ.row(static_cast<Index>(t)) = G.row(Z[t]);
      gZ[static_cast<Index>(t)] = -g[Z[t]];
    }
    const Vector u = min_norm_solve(GZ, gZ);
    if (norm_inf(GZ * u - gZ) > 1e-9 * (1 + norm_inf(gZ) + norm_inf(u))) continue;
    const Vector w = G * u + g;
    const double tol = 1e-9 * (1 + norm_inf(g) + norm_inf(G * u));
    bool ok = true;
    for (Index i = 0; i < n && ok; ++i) {
      const int sg = sign[static_cast<size_t>(i)];
      if (sg == 1 && w[i] < -tol) ok = false;
      if (sg == -1 && w[i] > tol) ok = false;
    }
    if (ok) return true;
  }
  return false;
}

OracleSolution enumerate_solve(const QpProblem& p, const Shifts& s) {
  const auto opts = state_options(p, s);
  const Index n = p.n(), m = p.m();
  OracleSolution out;
  out.status = Status::IterationLimit;  // placeholder until decided
  double fmin = kInf, fmax = -kInf;

  out.partitions_tried = for_each_assignment(opts, [&](const std::vector<VarStatus>& st) {
    Partition part(n);
    Vector x = Vector::Zero(n);
    std::vector<Index> B;
    for (Index i = 0; i < n; ++i) {
      const VarStatus v = st[static_cast<size_t>(i)];
      part.set(i, v);
      if (v == VarStatus::Basic) B.push_back(i);
      else x[i] = v == VarStatus::AtLower ? lo_of(p, s, i) : up_of(p, s, i);
    }
    const Index nb = static_cast<Index>(B.size());
    Matrix K = own_kb(p, B);
    Vector rhs(nb + m);
    const Vector HxN = p.H() * x;
    for (Index t = 0; t < nb; ++t) {
      const Index i = B[static_cast<size_t>(t)];
      rhs[t] = -p.c()[i] - HxN[i] - s.r[i];
    }
    rhs.tail(m) = p.b() - p.A() * x;

    // Own nonsingularity test: skip bases that are singular to working
    // precision rather than trust a factorization on them.
    const Eigen::JacobiSVD<Matrix> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    if (sv.size() > 0 && (sv[0] == 0 || sv[sv.size() - 1] <= kBasisRcond * sv[0])) return false;
    const Vector w = svd.solve(rhs);
    if (n <= 8) {
      const Vector w2 = gaussian_solve(K, rhs);
      // Agreement is only expected up to the conditioning of K.
      const double cond = sv.size() > 0 ? sv[0] / sv[sv.size() - 1] : 1.0;
      if (norm_inf(w - w2) > (1e-7 + 1e-14 * cond) * (1 + norm_inf(w)))
        throw InternalError("oracle: SVD and Gaussian elimination disagree");
    }
    for (Index t = 0; t < nb; ++t) x[B[static_cast<size_t>(t)]] = w[t];
    const Vector y = -w.tail(m);
    Vector z = p.H() * x + p.c() - p.A().transpose() * y;
    for (Index i : B) z[i] = -s.r[i];

    const double tol = 1e-9 * (1 + norm_inf(x) + norm_inf(z) + norm_inf(y));
    for (Index i = 0; i < n; ++i) {
      const VarStatus v = st[static_cast<size_t>(i)];
      const double wi = z[i] + s.r[i];
      const double lo = lo_of(p, s, i), up = up_of(p, s, i);
      if (v == VarStatus::Basic && (x[i] < lo - tol || x[i] > up + tol)) return false;
      if (lo == up) continue;
      if (v == VarStatus::AtLower && wi < -tol) return false;
      if (v == VarStatus::AtUpper && wi > tol) return false;
    }
    const Iterate it{x, y, z};
    const double f_p = primal_objective(p, s, it);
    ++out.optimal_witnesses;
    fmin = std::min(fmin, f_p);
    fmax = std::max(fmax, f_p);
    if (out.status != Status::Optimal) {
      out.status = Status::Optimal;
      out.iterate = it;
      out.objective = f_p;
      out.witness = part;
    }
    return false;
  });

  if (out.status == Status::Optimal) {
    if (fmax - fmin > 1e-8 * (1 + std::abs(fmin)))
      throw InternalError("oracle: optimal witnesses disagree on the objective");
    out.primal_feasible = out.dual_feasible = true;
    return out;
  }
  out.primal_feasible = primal_set_nonempty(p, s);
  out.dual_feasible = dual_set_nonempty(p, s);
  if (!out.primal_feasible) out.status = Status::PrimalInfeasible;
  else if (!out.dual_feasible) out.status = Status::DualInfeasible;
  else throw InternalError("oracle: both sets nonempty but no optimal partition found");
  return out;
}

std::string PropertyReport::summary() const {
  std::ostringstream os;
  os << (ok ? "ok" : "FAILED");
  if (!branch.empty()) os << " [" << branch << "]";
  for (const auto& v : violations) os << "; " << v;
  return os.str();
}

PropertyReport check_direction_propositions(const QpProblem& p, const Partition& part,
                                            const Direction& dir) {
  PropertyReport rep;
  // Steps may use −dir; the propositions are stated for the normalized one.
  const bool flip = dir.dx_l() == -1 || (std::abs(dir.dx_l()) != 1 && dir.dz_l() == -1);
  const Direction d = flip ? -dir : dir;
  const Index l = d.l;
  const std::vector<Index> B = part.basic();
  const double hn = p.H().size() ? p.H().cwiseAbs().maxCoeff() : 0;
  const double an = p.A().size() ? p.A().cwiseAbs().maxCoeff() : 0;
  const double mn = p.M().size() ? p.M().cwiseAbs().maxCoeff() : 0;
  const double scale = 1 + (hn + an) * norm_inf(d.dx) + (an + mn) * norm_inf(d.dy) +
                       norm_inf(d.dz);

  for (Index i = 0; i < p.n(); ++i) {
    if (i == l) continue;
    if (part.is_nonbasic(i) && d.dx[i] != 0) rep.fail("dx nonzero on N at " + std::to_string(i));
    if (part.is_basic(i) && std::abs(d.dz[i]) > 1e-12 * scale)
      rep.fail("dz nonzero on B at " + std::to_string(i));
  }
  const double r1 = norm_inf(p.H() * d.dx - p.A().transpose() * d.dy - d.dz);
  const double r2 = norm_inf(p.A() * d.dx + p.M() * d.dy);
  if (r1 > 1e-9 * scale) rep.fail("stationarity rows not homogeneous: " + std::to_string(r1));
  if (r2 > 1e-9 * scale) rep.fail("constraint rows not homogeneous: " + std::to_string(r2));

  const double curv = d.dx.dot(p.H() * d.dx) + d.dy.dot(p.M() * d.dy);
  const double prod = d.dx_l() * d.dz_l();
  const double iscale = scale * scale;
  if (std::abs(prod - curv) > 1e-9 * iscale)
    rep.fail("dx_l*dz_l != dx'H dx + dy'M dy: " + std::to_string(prod) + " vs " +
             std::to_string(curv));
  if (std::abs(d.dx.dot(d.dz) - curv) > 1e-9 * iscale) rep.fail("dx'dz != curvature");
  if (prod < -1e-10 * iscale) rep.fail("dx_l*dz_l negative");

  const Matrix KB = own_kb(p, B);
  std::vector<Index> Bl{l};
  Bl.insert(Bl.end(), B.begin(), B.end());
  const Matrix Kl = own_kb(p, Bl);
  const Index rB = numerical_rank(KB), rl = numerical_rank(Kl);
  const bool kb_ok = rB == KB.rows(), kl_ok = rl == Kl.rows();
  const double tol = 1e-9 * scale;
  const Index nb = static_cast<Index>(B.size()), m = p.m();

  if (std::abs(d.dx_l() - 1) <= 1e-12) {
    if (!kb_ok) rep.fail("base direction computed from a singular K_B");
    if (d.dz_l() > tol) {
      rep.branch = "base: K_l nonsingular, dz_l > 0";
      if (!kl_ok) rep.fail("dz_l > 0 but K_l singular");
    } else if (std::abs(d.dz_l()) <= tol) {
      rep.branch = "base: K_l singular, dz_l = 0";
      if (kl_ok) rep.fail("dz_l = 0 but K_l nonsingular");
      if (rl != Kl.rows() - 1) rep.fail("null space of K_l is not one-dimensional");
      Vector v = Vector::Zero(Kl.rows());
      v[0] = d.dx_l();
      for (Index t = 0; t < nb; ++t) v[1 + t] = d.dx[B[static_cast<size_t>(t)]];
      if (norm_inf(Kl * v) > tol) rep.fail("(dx_l, dx_B, 0) is not a null vector of K_l");
      if (norm_inf(d.dy) > tol) rep.fail("dy nonzero in the singular case");
      if (norm_inf(d.dz) > tol) rep.fail("dz nonzero in the singular case");
    } else {
      rep.fail("dz_l negative in a base direction");
    }
  } else if (std::abs(d.dz_l() - 1) <= 1e-12) {
    if (!kl_ok) rep.fail("intermediate direction computed from a singular K_l");
    if (d.dx_l() > tol) {
      rep.branch = "intermediate: K_B nonsingular, dx_l > 0";
      if (!kb_ok) rep.fail("dx_l > 0 but K_B singular");
    } else if (std::abs(d.dx_l()) <= tol) {
      rep.branch = "intermediate: K_B singular, dx_l = 0";
      if (kb_ok) rep.fail("dx_l = 0 but K_B nonsingular");
      Vector v(nb + m);
      for (Index t = 0; t < nb; ++t) v[t] = d.dx[B[static_cast<size_t>(t)]];
      v.tail(m) = -d.dy;
      if (norm_inf(KB * v) > tol || norm_inf(v) <= tol)
        rep.fail("(dx_B, -dy) is not a null vector of K_B");
    } else {
      rep.fail("dx_l negative in an intermediate direction");
    }
  } else {
    rep.fail("neither dx_l = 1 nor dz_l = 1 (direction not normalized)");
  }
  return rep;
}

PropertyReport check_objective_identity(const QpProblem& p, const Shifts& s, const Iterate& it,
                                        const Direction& d, double alpha) {
  PropertyReport rep;
  const Iterate after{it.x + alpha * d.dx, it.y + alpha * d.dy, it.z + alpha * d.dz};
  const double quad = 0.5 * alpha * alpha * d.dx_l() * d.dz_l();

  const double fp0 = primal_objective(p, s, it), fp1 = primal_objective(p, s, after);
  double lin = 0;
  for (Index i = 0; i < p.n(); ++i) lin += d.dx[i] * (it.z[i] + s.r[i]);
  rep.lhs = fp1 - fp0;
  rep.rhs = alpha * lin + quad;
  const double ps = 1 + std::abs(fp0) + std::abs(fp1) + std::abs(alpha * lin) + std::abs(quad);
  if (std::abs(rep.lhs - rep.rhs) > 1e-9 * ps)
    rep.fail("primal objective change " + std::to_string(rep.lhs) + " vs identity " +
             std::to_string(rep.rhs));

  // Dual: the bound term is piecewise linear in w_i = z_i + r_i (slope lo for
  // w > 0, up for w < 0), so take its exact change instead of one slope. With
  // no sign change this is (β_i − x_i) α Δz_i.
  // A free variable with w ≠ 0 pairs with x itself.
  auto phi = [&](Index i, double w, double x) {
    if (w == 0) return 0.0;
    const double lo = lo_of(p, s, i), up = up_of(p, s, i);
    if (w > 0) return (lo > -kInf ? lo : (up < kInf ? up : x)) * w;
    return (up < kInf ? up : (lo > -kInf ? lo : x)) * w;
  };
  double dlin = 0;
  for (Index i = 0; i < p.n(); ++i) {
    if (d.dz[i] == 0 && d.dx[i] == 0) continue;
    const double w0 = it.z[i] + s.r[i], w1 = w0 + alpha * d.dz[i];
    dlin += phi(i, w1, after.x[i]) - phi(i, w0, it.x[i]) - it.x[i] * alpha * d.dz[i];
  }
  const double fd0 = dual_objective(p, s, it), fd1 = dual_objective(p, s, after);
  rep.dual_lhs = fd1 - fd0;
  rep.dual_rhs = dlin - quad;
  const double ds = 1 + std::abs(fd0) + std::abs(fd1) + std::abs(dlin) + std::abs(quad);
  if (std::abs(rep.dual_lhs - rep.dual_rhs) > 1e-9 * ds)
    rep.fail("dual objective change " + std::to_string(rep.dual_lhs) + " vs identity " +
             std::to_string(rep.dual_rhs));
  return rep;
}

}  // namespace pdqp
