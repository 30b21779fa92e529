#include "pdqp/generate.hpp"

#include <algorithm>
#include <cmath>

namespace pdqp {

const char* to_string(Curvature c) {
  switch (c) {
    case Curvature::PositiveDefinite: return "pd";
    case Curvature::RankDeficient: return "rank-deficient";
    case Curvature::Zero: return "zero";
  }
  return "?";
}

const char* to_string(Construction c) {
  switch (c) {
    case Construction::Feasible: return "feasible";
    case Construction::PrimalInfeasible: return "primal-infeasible";
    case Construction::Unbounded: return "unbounded";
  }
  return "?";
}

namespace {

struct Draw {
  std::mt19937_64& rng;
  bool integer = false;

  double normal() {
    if (integer) return static_cast<double>(std::uniform_int_distribution<int>(-3, 3)(rng));
    return std::normal_distribution<double>()(rng);
  }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int pick(int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng); }
  bool coin(double p) { return uniform(0, 1) < p; }

  Matrix matrix(Index r, Index c) {
    Matrix X(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) X(i, j) = normal();
    return X;
  }
  Vector vector(Index r) { return matrix(r, 1).col(0); }
};

Matrix symmetrize(const Matrix& H) { return 0.5 * (H + H.transpose()); }

Matrix hessian(Draw& d, Index n, Curvature curv) {
  switch (curv) {
    case Curvature::PositiveDefinite: {
      const Matrix G = d.matrix(n, n);
      Matrix H = G.transpose() * G / static_cast<double>(n);
      H.diagonal().array() += d.integer ? 1.0 : 0.1;
      return symmetrize(H);
    }
    case Curvature::RankDeficient: {
      const Index k = 1 + d.pick(static_cast<int>(std::max<Index>(1, n - 1)));
      const Matrix G = d.matrix(k, n);
      return symmetrize(G.transpose() * G);
    }
    case Curvature::Zero:
      break;
  }
  return Matrix::Zero(n, n);
}

// Projector onto the complement of d.
Matrix complement(const Vector& d) {
  const Index n = d.size();
  return Matrix::Identity(n, n) - d * d.transpose() / d.squaredNorm();
}

Vector with_slope(Vector c, const Vector& d, double slope) {
  return c - (c.dot(d) - slope) / d.squaredNorm() * d;
}

}  // namespace

QpProblem random_qp(std::mt19937_64& rng, const RandomQpOptions& opt) {
  Draw d{rng, opt.integer_data};
  const Index n = opt.n, m = opt.m;
  Construction kind = opt.kind;
  if (kind == Construction::Unbounded && m >= n) kind = Construction::Feasible;
  const double mu = kind == Construction::PrimalInfeasible ? 0.0 : opt.mu;
  const Matrix M = mu * Matrix::Identity(m, m);

  Matrix H = hessian(d, n, opt.curvature);
  Matrix A = d.matrix(m, n);

  Vector x0(n);
  for (Index i = 0; i < n; ++i) x0[i] = d.coin(0.4) ? 0.0 : std::abs(d.normal()) + (d.integer ? 0 : 0.1);
  const Vector y0 = d.vector(m);

  Vector c;
  if (kind == Construction::Unbounded) {
    Vector dir(n);
    for (Index i = 0; i < n; ++i) dir[i] = d.coin(0.5) ? 0.0 : d.uniform(0.5, 2.0);
    if (dir.isZero()) dir[d.pick(static_cast<int>(n))] = 1.0;
    const Matrix P = complement(dir);
    H = symmetrize(P * H * P);
    A = A * P;
    c = with_slope(d.vector(n), dir, -1.0);
  } else {
    Vector z1(n);
    for (Index i = 0; i < n; ++i) z1[i] = d.coin(0.5) ? 0.0 : std::abs(d.normal());
    c = A.transpose() * d.vector(m) - H * d.vector(n) + z1;
  }

  Vector b = A * x0 + M * y0;
  if (kind == Construction::PrimalInfeasible) {
    for (Index j = 0; j < n; ++j) A(0, j) = std::abs(A(0, j)) + (d.integer ? 1.0 : 0.1);
    b = A * x0;
    b[0] = -1.0 - (d.integer ? d.pick(3) : d.uniform(0, 2));
  }
  return QpProblem(std::move(H), M, std::move(A), std::move(b), std::move(c));
}

GeneralQp random_general_qp(std::mt19937_64& rng, Index n, Index m, Curvature curvature,
                            Construction kind) {
  Draw d{rng, false};
  GeneralQp g;
  g.Hhat = hessian(d, n, curvature);
  g.Ahat = d.matrix(m, n);
  const Vector x0 = d.vector(n);
  const Vector act = g.Ahat * x0;
  g.lower = Vector::Constant(n + m, -kInf);
  g.upper = Vector::Constant(n + m, kInf);
  g.c = d.vector(n);

  auto gap = [&] { return d.coin(0.3) ? 0.0 : d.uniform(0.1, 2.0); };
  auto point = [&](Index k) { return k < n ? x0[k] : act[k - n]; };

  if (kind == Construction::Unbounded) {
    const Vector dir = d.vector(n);
    const Matrix P = complement(dir);
    g.Hhat = symmetrize(P * g.Hhat * P);
    g.c = with_slope(g.c, dir, -1.0);
    const Vector slope = g.Ahat * dir;
    for (Index k = 0; k < n + m; ++k) {
      const double s = k < n ? dir[k] : slope[k - n];
      if (d.coin(0.3)) continue;  // free
      if (s >= 0) g.lower[k] = point(k) - gap();
      else g.upper[k] = point(k) + gap();
    }
    return g;
  }

  for (Index k = 0; k < n + m; ++k) {
    const double v = point(k);
    switch (d.pick(kind == Construction::PrimalInfeasible && k < n ? 1 : 6)) {
      case 0:
        g.lower[k] = v - gap();
        g.upper[k] = v + gap();
        break;
      case 1: g.lower[k] = v - gap(); break;
      case 2: g.upper[k] = v + gap(); break;
      case 3: break;
      case 4: g.lower[k] = g.upper[k] = v; break;
      default:
        g.lower[k] = v - gap();
        g.upper[k] = v + gap();
    }
  }
  if (kind == Construction::PrimalInfeasible) {
    // Row 1 cannot reach its lower bound anywhere in the variable box.
    double top = 0;
    for (Index j = 0; j < n; ++j)
      top += std::max(g.Ahat(0, j) * g.lower[j], g.Ahat(0, j) * g.upper[j]);
    g.lower[n] = top + d.uniform(0.5, 2.0);
    g.upper[n] = d.coin(0.5) ? kInf : g.lower[n] + 1.0;
  }
  return g;
}

GeneratedProblem large_convex_problem(Index n, Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Draw d{rng, false};
  GeneratedProblem out;
  GeneralQp& g = out.qp;
  g.name = "convex" + std::to_string(n);

  const Index k = 20;
  const Matrix G = d.matrix(k, n);
  g.Hhat = symmetrize(G.transpose() * G / static_cast<double>(k));
  for (Index i = 0; i < n; ++i) g.Hhat(i, i) += d.uniform(1.0, 2.0);
  g.Ahat = d.matrix(m, n) / std::sqrt(static_cast<double>(n));

  Vector x(n), lam = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const double u = d.uniform(0, 1);
    if (u < 0.06) {
      x[i] = -1;
      lam[i] = d.uniform(0.5, 2.0);
    } else if (u < 0.12) {
      x[i] = 1;
      lam[i] = -d.uniform(0.5, 2.0);
    } else {
      x[i] = d.uniform(-0.9, 0.9);
    }
  }
  const Vector act = g.Ahat * x;
  g.lower = Vector::Constant(n + m, -1.0);
  g.upper = Vector::Constant(n + m, 1.0);
  Vector mu = Vector::Zero(m);
  for (Index j = 0; j < m; ++j) {
    const double u = d.uniform(0, 1);
    double lo = act[j] - d.uniform(0.5, 2.0), up = act[j] + d.uniform(0.5, 2.0);
    if (u < 0.1) {
      lo = act[j];
      mu[j] = d.uniform(0.5, 2.0);
    } else if (u < 0.2) {
      up = act[j];
      mu[j] = -d.uniform(0.5, 2.0);
    }
    g.lower[n + j] = lo;
    g.upper[n + j] = up;
  }
  // Stationarity Ĥx + c = λ + Âᵀμ with λ, μ signed by the active side.
  g.c = -g.Hhat * x + lam + g.Ahat.transpose() * mu;
  out.x_opt = x;
  return out;
}

}  // namespace pdqp
