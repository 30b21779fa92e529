#include "common.hpp"

#include "pdqp/kkt.hpp"
#include "pdqp/oracle.hpp"

using namespace pdqp;
using namespace pdqp::test;

TEST_CASE("enumerate_solve on the small examples") {
  const OracleSolution a = enumerate_solve(p1(), Shifts::zero(2));
  REQUIRE(a.status == Status::Optimal);
  CHECK(near(a.iterate.x, vec({0.5, 0.5})));
  CHECK(a.objective == doctest::Approx(0.25));
  CHECK(a.witness.basic() == std::vector<Index>{0, 1});

  const OracleSolution b = enumerate_solve(p2(), Shifts::zero(2));
  REQUIRE(b.status == Status::Optimal);
  CHECK(near(b.iterate.x, vec({0, 1})));
  CHECK(near(b.iterate.z, vec({1, 0})));
  CHECK(b.witness.basic() == std::vector<Index>{1});

  const OracleSolution c = enumerate_solve(p1(-1), Shifts::zero(2));
  CHECK(c.status == Status::PrimalInfeasible);
  CHECK_FALSE(c.primal_feasible);
  CHECK(c.dual_feasible);

  const OracleSolution u = enumerate_solve(h0_unbounded(), Shifts::zero(2));
  CHECK(u.status == Status::DualInfeasible);
  CHECK(u.primal_feasible);
  CHECK_FALSE(u.dual_feasible);
}

TEST_CASE("feasible sets") {
  CHECK(primal_set_nonempty(p1(), Shifts::zero(2)));
  CHECK_FALSE(primal_set_nonempty(p1(-1), Shifts::zero(2)));
  Shifts s = Shifts::zero(2);
  s.q = vec({0, 1});
  CHECK(primal_set_nonempty(p1(-1), s));
  CHECK(dual_set_nonempty(p2(), Shifts::zero(2)));
  CHECK_FALSE(dual_set_nonempty(h0_unbounded(), Shifts::zero(2)));
}

TEST_CASE("budget") {
  const Index n = 17;
  const QpProblem big(Matrix::Identity(n, n), Matrix::Zero(1, 1), Matrix::Ones(1, n), vec({1}),
                      Vector::Zero(n));
  CHECK_THROWS_AS(enumerate_solve(big, Shifts::zero(n)), BudgetExceeded);
}

TEST_CASE("direction propositions on hand directions") {
  const QpProblem a = p1();
  Partition part = Partition::from_basis(2, {1});
  part.free_index(0);
  const auto f = require_factor(factor_kb(a, Partition::from_basis(2, {1})), "test");
  const Direction base = solve_base_primal(a, part, f, 0);
  const PropertyReport rb = check_direction_propositions(a, part, base);
  CHECK(rb.ok);
  CHECK(rb.branch == "base: K_l nonsingular, dz_l > 0");
  // Flipped direction is normalized.
  CHECK(check_direction_propositions(a, part, -base).ok);

  const QpProblem u = h0_unbounded();
  const auto fu = require_factor(factor_kb(u, Partition::from_basis(2, {1})), "test");
  const Direction ub = solve_base_primal(u, part, fu, 0);
  const PropertyReport ru = check_direction_propositions(u, part, ub);
  CHECK(ru.ok);
  CHECK(ru.branch == "base: K_l singular, dz_l = 0");

  const Direction inter = solve_intermediate_primal(a, part, 0);
  const PropertyReport ri = check_direction_propositions(a, part, inter);
  CHECK(ri.ok);
  CHECK(ri.branch == "intermediate: K_B nonsingular, dx_l > 0");

  // A broken direction is caught.
  Direction bad = base;
  bad.dy[0] += 0.1;
  CHECK_FALSE(check_direction_propositions(a, part, bad).ok);
}

TEST_CASE("objective identity on P1") {
  const QpProblem a = p1();
  Partition part = Partition::from_basis(2, {1});
  part.free_index(0);
  const auto f = require_factor(factor_kb(a, Partition::from_basis(2, {1})), "test");
  const Direction d = solve_base_primal(a, part, f, 0);
  const Iterate it{vec({0, 1}), vec({1}), vec({-1, 0})};
  const PropertyReport half = check_objective_identity(a, Shifts::zero(2), it, d, 0.5);
  CHECK(half.ok);
  CHECK(half.lhs == doctest::Approx(-0.25));
  const PropertyReport zero = check_objective_identity(a, Shifts::zero(2), it, d, 0);
  CHECK(zero.ok);
  CHECK(zero.lhs == 0);
}

TEST_CASE("gaussian_solve and numerical_rank") {
  Matrix K(3, 3);
  K << 0, 1, 2, 1, 0, 3, 4, -3, 8;
  const Vector x = vec({1, -2, 0.5});
  CHECK(near(gaussian_solve(K, K * x), x, 1e-12));
  CHECK(numerical_rank(K) == 3);
  Matrix S = K;
  S.row(2) = S.row(0) + 2 * S.row(1);
  CHECK(numerical_rank(S) == 2);
  CHECK_THROWS_AS(gaussian_solve(S, vec({1, 1, 1})), InternalError);
}

TEST_CASE("rank splitting on constructed singular systems") {
  // K_B singular iff there is (u, v) with H_B u = A_Bᵀ v, A_B u = 0; the
  // oracle's SVD rank should agree with the factorization verdict.
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd;
  int singular = 0, regular = 0;
  for (int t = 0; t < 200; ++t) {
    const Index n = 2 + t % 4, m = 1 + t % 2;
    Matrix G(n - 1, n);
    for (Index i = 0; i < G.rows(); ++i)
      for (Index j = 0; j < n; ++j) G(i, j) = nd(rng);
    Matrix H = t % 2 ? Matrix(G.transpose() * G) : Matrix(G.transpose() * G + Matrix::Identity(n, n));
    H = 0.5 * (H + H.transpose()).eval();
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) A(i, j) = nd(rng);
    if (t % 4 == 1) {
      // Put H's null vector into the null space of A.
      Eigen::SelfAdjointEigenSolver<Matrix> es(H);
      const Vector u = es.eigenvectors().col(0);
      A -= (A * u) * u.transpose();
    }
    std::optional<QpProblem> p;
    try {
      p.emplace(H, Matrix::Zero(m, m), A, Vector::Zero(m), Vector::Zero(n));
    } catch (const ModelError&) {
      continue;
    }
    std::vector<Index> all;
    for (Index i = 0; i < n; ++i) all.push_back(i);
    const KktResult r = factor_kb(*p, Partition::from_basis(n, all));
    Matrix K(n + m, n + m);
    K << H, A.transpose(), A, Matrix::Zero(m, m);
    const bool full = numerical_rank(K) == n + m;
    CHECK(full == std::holds_alternative<KktFactorization>(r));
    (full ? regular : singular)++;
  }
  CHECK(singular > 10);
  CHECK(regular > 10);
}
