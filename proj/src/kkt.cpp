#include "pdqp/kkt.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace pdqp {

Matrix assemble_kb(const QpProblem& p, const std::vector<Index>& basis) {
  const Index nb = static_cast<Index>(basis.size()), m = p.m();
  Matrix K(nb + m, nb + m);
  for (Index j = 0; j < nb; ++j) {
    const Index bj = basis[static_cast<size_t>(j)];
    for (Index i = 0; i < nb; ++i) K(i, j) = p.H()(basis[static_cast<size_t>(i)], bj);
    for (Index r = 0; r < m; ++r) {
      K(nb + r, j) = p.A()(r, bj);
      K(j, nb + r) = p.A()(r, bj);
    }
  }
  K.bottomRightCorner(m, m) = -p.M();
  return K;
}

Matrix assemble_kl(const QpProblem& p, const std::vector<Index>& basis, Index l) {
  std::vector<Index> ext;
  ext.reserve(basis.size() + 1);
  ext.push_back(l);
  ext.insert(ext.end(), basis.begin(), basis.end());
  return assemble_kb(p, ext);
}

Vector KktFactorization::solve(const Vector& rhs) const {
  Vector w = ldl_.solve(rhs);
  const Vector res = rhs - K_ * w;
  w += ldl_.solve(res);
  return w;
}

KktResult factor_matrix(Matrix K, std::vector<Index> basis) {
  const double tol = kPivotTol * std::max(inf_norm(K), 1e-300);
  LdlFactor::Failure fail{};
  auto ldl = LdlFactor::factor(K, tol, &fail);
  if (ldl) return KktFactorization(std::move(basis), std::move(K), std::move(*ldl));
  SingularReport rep;
  rep.basis = std::move(basis);
  rep.failed_step = fail.step;
  rep.pivot_tolerance = tol;
  if (K.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    Index arg = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&arg);
    rep.null_vector = es.eigenvectors().col(arg);
    rep.smallest_eigenvalue = es.eigenvalues()[arg];
  }
  return rep;
}

KktResult factor_kb(const QpProblem& p, const Partition& part) {
  std::vector<Index> basis = part.basic();
  Matrix K = assemble_kb(p, basis);
  return factor_matrix(std::move(K), std::move(basis));
}

KktFactorization require_factor(KktResult r, const char* context) {
  if (auto* f = std::get_if<KktFactorization>(&r)) return std::move(*f);
  throw SingularKkt(std::string("singular KKT matrix in ") + context,
                    std::get<SingularReport>(std::move(r)));
}

SocBasisResult find_soc_basis(const QpProblem& p) {
  const Index n = p.n(), m = p.m(), d = n + m;
  Matrix S(d, d);
  S.topLeftCorner(n, n) = p.H();
  S.topRightCorner(n, m) = p.A().transpose();
  S.bottomLeftCorner(m, n) = p.A();
  S.bottomRightCorner(m, m) = -p.M();
  const double tol = kPivotTol * std::max(inf_norm(S), 1e-300);
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;
  // Threshold for preferring a free-variable pivot over the overall best.
  const double gamma = 0.1;

  auto is_free = [&](Index i) { return i < n && p.is_free(i); };
  std::vector<Index> rest(static_cast<size_t>(d));
  for (Index i = 0; i < d; ++i) rest[static_cast<size_t>(i)] = i;
  std::vector<bool> pivoted(static_cast<size_t>(d), false);

  while (!rest.empty()) {
    double bestd = -1, besto = -1, freed = -1, freeo = -1;
    Index di = -1, oi = -1, oj = -1, fdi = -1, foi = -1, foj = -1;
    for (size_t a = 0; a < rest.size(); ++a) {
      const Index i = rest[a];
      const double v = std::abs(S(i, i));
      if (v > bestd) bestd = v, di = i;
      if (is_free(i) && v > freed) freed = v, fdi = i;
      for (size_t b = a + 1; b < rest.size(); ++b) {
        const Index j = rest[b];
        const double o = std::abs(S(i, j));
        if (o > besto) besto = o, oi = i, oj = j;
        if ((is_free(i) || is_free(j)) && o > freeo) {
          const double det = S(i, i) * S(j, j) - S(i, j) * S(i, j);
          if (std::abs(det) >= gamma * o * o) freeo = o, foi = i, foj = j;
        }
      }
    }
    const double big = std::max(bestd, besto);
    if (big <= tol) break;

    Index p1 = -1, p2 = -1;
    if (fdi >= 0 && freed >= gamma * big && freed > tol) {
      p1 = fdi;
    } else if (foi >= 0 && freeo >= gamma * big && freeo > tol) {
      p1 = foi;
      p2 = foj;
    } else if (bestd >= alpha * besto) {
      p1 = di;
    } else {
      p1 = oi;
      p2 = oj;
    }

    std::vector<Index> others;
    for (Index i : rest)
      if (i != p1 && i != p2) others.push_back(i);
    if (p2 < 0) {
      const double piv = S(p1, p1);
      for (Index i : others)
        for (Index j : others) S(i, j) -= S(i, p1) * S(p1, j) / piv;
    } else {
      const double a = S(p1, p1), b = S(p1, p2), c = S(p2, p2);
      const double det = a * c - b * b;
      for (Index i : others) {
        const double u1 = S(i, p1), u2 = S(i, p2);
        const double l1 = (c * u1 - b * u2) / det, l2 = (a * u2 - b * u1) / det;
        for (Index j : others) S(i, j) -= l1 * S(p1, j) + l2 * S(p2, j);
      }
      pivoted[static_cast<size_t>(p2)] = true;
    }
    pivoted[static_cast<size_t>(p1)] = true;
    rest = std::move(others);
  }

  SocBasisResult out;
  out.partition = Partition(n);
  for (Index i = n; i < d; ++i)
    if (!pivoted[static_cast<size_t>(i)])
      throw InternalError("SOC basis discovery left a constraint row unpivoted");
  for (Index i = 0; i < n; ++i) {
    if (pivoted[static_cast<size_t>(i)]) {
      out.partition.set(i, VarStatus::Basic);
    } else {
      out.deferred.push_back(i);
      out.partition.set(i, p.has_lower(i)   ? VarStatus::AtLower
                           : p.has_upper(i) ? VarStatus::AtUpper
                                            : VarStatus::TempFixed);
    }
  }
  return out;
}

namespace {

Direction finish_direction(const QpProblem& p, const Partition& part, Vector dx, Vector dy,
                           Index l) {
  Vector dz = p.H() * dx - p.A().transpose() * dy;
  for (Index i = 0; i < p.n(); ++i)
    if (part.is_basic(i)) dz[i] = 0;
  return {std::move(dx), std::move(dy), std::move(dz), l};
}

}  // namespace

Direction solve_base_primal(const QpProblem& p, const Partition& part, const KktFactorization& f,
                            Index l) {
  const auto& B = f.basis();
  const Index nb = static_cast<Index>(B.size()), m = p.m();
  Vector rhs(nb + m);
  for (Index i = 0; i < nb; ++i) rhs[i] = -p.H()(B[static_cast<size_t>(i)], l);
  rhs.tail(m) = -p.A().col(l);
  const Vector w = f.solve(rhs);
  Vector dx = Vector::Zero(p.n());
  for (Index i = 0; i < nb; ++i) dx[B[static_cast<size_t>(i)]] = w[i];
  dx[l] = 1.0;
  return finish_direction(p, part, std::move(dx), -w.tail(m), l);
}

Direction solve_intermediate_primal(const QpProblem& p, const Partition& part, Index l,
                                    const KktFactorization& fl) {
  const std::vector<Index> B = part.basic();
  const Index nb = static_cast<Index>(B.size()), m = p.m();
  Vector rhs = Vector::Zero(nb + m + 1);
  rhs[0] = 1.0;
  const Vector w = fl.solve(rhs);
  Vector dx = Vector::Zero(p.n());
  dx[l] = w[0];
  for (Index i = 0; i < nb; ++i) dx[B[static_cast<size_t>(i)]] = w[1 + i];
  Direction dir = finish_direction(p, part, std::move(dx), -w.tail(m), l);
  dir.dz[l] = 1.0;
  return dir;
}

Direction solve_intermediate_primal(const QpProblem& p, const Partition& part, Index l) {
  std::vector<Index> B = part.basic();
  auto fl = require_factor(factor_matrix(assemble_kl(p, B, l), B), "K_l solve");
  return solve_intermediate_primal(p, part, l, fl);
}

Vector recover_z_nonbasic(const QpProblem& p, const Partition& part, const Iterate& it,
                          const Shifts& /*s*/) {
  const std::vector<Index> N = part.nonbasic();
  Vector out(static_cast<Index>(N.size()));
  for (size_t t = 0; t < N.size(); ++t) {
    const Index j = N[t];
    out[static_cast<Index>(t)] =
        p.H().col(j).dot(it.x) + p.c()[j] - p.A().col(j).dot(it.y);
  }
  return out;
}

KktFactorization refactor_after_swap(const QpProblem& p, const Partition& part,
                                     const KktFactorization& old, std::optional<Index> removed,
                                     std::optional<Index> added) {
  if (!removed && !added && old.basis() == part.basic()) return old;
  return require_factor(factor_kb(p, part), "refactor after basis change");
}

}  // namespace pdqp
