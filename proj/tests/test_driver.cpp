#include "common.hpp"

#include "pdqp/generate.hpp"
#include "pdqp/kkt.hpp"
#include "pdqp/oracle.hpp"
#include "pdqp/problem_file.hpp"

using namespace pdqp;
using namespace pdqp::test;

namespace {

GeneralQp small_general() {
  GeneralQp g;
  g.Hhat = Matrix::Identity(2, 2);
  g.Ahat = Matrix::Ones(1, 2);
  g.c = vec({0, 0});
  g.lower = vec({0, 0, 1});
  g.upper = vec({kInf, kInf, 1});
  g.name = "small";
  return g;
}

}  // namespace

TEST_CASE("standardize") {
  const StandardForm sf = standardize(small_general());
  const QpProblem& p = sf.problem;
  CHECK(p.n() == 3);
  CHECK(p.m() == 1);
  CHECK(p.A() == Matrix(vec({1, 1, -1}).transpose()));
  CHECK(p.b() == vec({0}));
  CHECK(p.M() == Matrix::Zero(1, 1));
  CHECK(p.H().topLeftCorner(2, 2) == Matrix::Identity(2, 2));
  CHECK(p.H().col(2).isZero());
  CHECK(p.lower() == vec({0, 0, 1}));
  CHECK(p.upper() == vec({kInf, kInf, 1}));
  CHECK(sf.n_orig == 2);
  CHECK(sf.m_orig == 1);
}

TEST_CASE("validate") {
  GeneralQp g = small_general();
  CHECK_NOTHROW(validate(g));
  g.lower[0] = 2;
  g.upper[0] = 1;
  CHECK_THROWS_AS(validate(g), ModelError);
  g = small_general();
  g.lower = vec({0, 0});
  CHECK_THROWS_AS(validate(g), ModelError);
  g = small_general();
  g.Hhat = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(validate(g), ModelError);
  g = small_general();
  g.lower[0] = kInf;
  CHECK_THROWS_AS(validate(g), ModelError);
}

TEST_CASE("init_shifts") {
  auto [s2, it2] = init_shifts(p2(), Partition::from_basis(2, {0}));
  CHECK(near(it2.x, vec({1, 0})));
  CHECK(near(it2.y, vec({3})));
  CHECK(near(s2.r, vec({0, 3})));
  CHECK(s2.q.isZero());
  CHECK(check_optimality(p2(), s2, it2, 1e-12, 1e-12).optimal);

  auto [s1, it1] = init_shifts(p1(), Partition::from_basis(2, {0, 1}));
  CHECK(s1.q.isZero());
  CHECK(s1.r.isZero());
  CHECK(near(it1.x, vec({0.5, 0.5})));

  // b = −1 with B = {1}: x_2 = −1 needs q_2 = 1.
  auto [sb, itb] = init_shifts(p1(-1), Partition::from_basis(2, {1}));
  CHECK(near(sb.q, vec({0, 1})));
  CHECK(near(itb.x, vec({0, -1})));
}

TEST_CASE("init_shifts gives a shifted optimum on random problems") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    GeneralQp g;
    try {
      g = random_general_qp(rng, 2 + t % 5, 1 + t % 3, static_cast<Curvature>(t % 3),
                            Construction::Feasible);
      const StandardForm sf = standardize(g);
      const Partition part = find_soc_basis(sf.problem).partition;
      auto [s, it] = init_shifts(sf.problem, part);
      CHECK(check_optimality(sf.problem, s, it, 1e-9, 1e-9).optimal);
      CHECK((s.q.array() >= 0).all());
      CHECK((s.q_upper.array() >= 0).all());
    } catch (const ModelError&) {
      continue;
    }
  }
}

TEST_CASE("solve_pdqp on the small examples") {
  const PdqpSolution a = solve_pdqp(p1());
  REQUIRE(a.status == Status::Optimal);
  CHECK(near(a.x, vec({0.5, 0.5}), 1e-12));
  CHECK(a.objective == doctest::Approx(0.25));

  const PdqpSolution b = solve_pdqp(p2());
  REQUIRE(b.status == Status::Optimal);
  CHECK(near(b.x, vec({0, 1}), 1e-12));

  CHECK(solve_pdqp(p1(-1)).status == Status::PrimalInfeasible);
  const PdqpSolution u = solve_pdqp(h0_unbounded());
  CHECK(u.status == Status::DualInfeasible);
  CHECK(u.certificate.has_value());

  const PdqpSolution g = solve_pdqp(small_general());
  REQUIRE(g.status == Status::Optimal);
  CHECK(near(g.x, vec({0.5, 0.5}), 1e-12));
  CHECK(g.objective == doctest::Approx(0.25));
}

TEST_CASE("every strategy agrees on the fixtures") {
  for (const char* name : {"p1", "p2", "box3", "free_rows", "degenerate", "lp_small", "fixed_var",
                           "bqp1var"}) {
    CAPTURE(name);
    const GeneralQp g = parse_problem(kFixtures + "/" + name + ".qpt");
    const OracleSolution ref = enumerate_solve(standardize(g).problem, Shifts::zero(
                                                                         g.n() + g.m()));
    REQUIRE(ref.status == Status::Optimal);
    for (Strategy st : {Strategy::Auto, Strategy::PrimalFirst, Strategy::DualFirst}) {
      SolveConfig cfg;
      cfg.strategy = st;
      const PdqpSolution s = solve_pdqp(g, cfg);
      REQUIRE(s.status == Status::Optimal);
      CHECK(near(s.objective, ref.objective, 1e-9));
    }
  }
}

TEST_CASE("temporary bound registry") {
  Partition part = Partition::from_basis(3, {0});
  part.set(2, VarStatus::TempFixed);
  const Iterate it{vec({1, 0, 0}), vec({0}), vec({0, 1, 2})};
  TemporaryBoundRegistry reg = register_temporary_bounds(part, it);
  REQUIRE(reg.entries.size() == 1);
  CHECK(reg.entries[0].j == 2);
  CHECK(reg.entries[0].zbar == 2);

  // A primal stage may change the reduced cost, a dual one may not.
  Iterate moved = it;
  moved.z[2] = 0;
  TemporaryBoundRegistry r1 = reg;
  CHECK_NOTHROW(temporary_bound_pass(r1, Method::Primal, part, moved));
  CHECK(r1.entries[0].zbar == 0);
  TemporaryBoundRegistry r2 = reg;
  CHECK_THROWS_AS(temporary_bound_pass(r2, Method::Dual, part, moved), InternalError);

  part.set(2, VarStatus::Basic);
  temporary_bound_pass(reg, Method::Dual, part, moved);
  CHECK(reg.entries[0].released);
}

TEST_CASE("tempbound: free variable is released by the solve") {
  const GeneralQp g = parse_problem(kFixtures + "/tempbound.qpt");
  const PdqpSolution s = solve_pdqp(g);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(-200.5));
  CHECK_FALSE(s.registry.empty());
  for (const auto& e : s.registry.entries)
    if (!e.released) CHECK(std::abs(s.iterate.z[e.j]) < 1e-8);
}

TEST_CASE("only strategies reject bad starts") {
  SolveConfig cfg;
  cfg.strategy = Strategy::DualOnly;
  CHECK(solve_pdqp(p2(), [] {
          SolveConfig c;
          c.strategy = Strategy::DualOnly;
          c.initial_basis = std::vector<Index>{0};
          return c;
        }())
            .status == Status::InvalidStart);
  cfg.strategy = Strategy::PrimalOnly;
  cfg.initial_basis = std::vector<Index>{1};
  CHECK(solve_pdqp(p1(-1), cfg).status == Status::InvalidStart);
}

TEST_CASE("iteration limit") {
  SolveConfig cfg;
  cfg.max_iterations = 0;
  CHECK(solve_pdqp(p2(), [] {
          SolveConfig c;
          c.max_iterations = 0;
          c.initial_basis = std::vector<Index>{0};
          return c;
        }())
            .status == Status::IterationLimit);
}

TEST_CASE("strategy names round-trip") {
  for (Strategy s : {Strategy::Auto, Strategy::PrimalFirst, Strategy::DualFirst,
                     Strategy::PrimalOnly, Strategy::DualOnly})
    CHECK(strategy_from_string(to_string(s)) == s);
  CHECK_FALSE(strategy_from_string("sideways").has_value());
}

TEST_CASE("every strategy matches the oracle on random instances") {
  // Rank-deficient and zero curvature cases exercise the singular-K_l and
  // degenerate-blocking paths where rounding decides the branch.
  std::mt19937_64 rng(77);
  int checked = 0;
  for (int k = 0; k < 1500; ++k) {
    const Curvature curv = static_cast<Curvature>(k % 3);
    const Construction kind = static_cast<Construction>((k / 3) % 3);
    std::optional<QpProblem> p;
    std::optional<GeneralQp> g;
    try {
      if (k % 2) {
        g = random_general_qp(rng, 2 + rng() % 5, 1 + rng() % 3, curv, kind);
        p = standardize(*g).problem;
      } else {
        RandomQpOptions o;
        o.n = 2 + rng() % 8;
        o.m = 1 + rng() % std::min<Index>(3, o.n - 1);
        o.curvature = curv;
        o.kind = kind;
        o.mu = k % 4 == 0 ? 1e-2 : 0;
        o.integer_data = k % 7 == 0;
        p = random_qp(rng, o);
      }
    } catch (const ModelError&) {
      continue;
    }
    const OracleSolution ref = enumerate_solve(*p, Shifts::zero(p->n()));
    if (!ref.primal_feasible && !ref.dual_feasible) continue;
    for (Strategy st : {Strategy::Auto, Strategy::PrimalFirst, Strategy::DualFirst}) {
      CAPTURE(k);
      CAPTURE(to_string(st));
      SolveConfig cfg;
      cfg.strategy = st;
      const PdqpSolution s = g ? solve_pdqp(*g, cfg) : solve_pdqp(*p, cfg);
      REQUIRE(s.status == ref.status);
      if (s.status == Status::Optimal) CHECK(near(s.objective, ref.objective, 1e-7));
      ++checked;
    }
  }
  CHECK(checked > 3000);
}
