#include "common.hpp"

#include "pdqp/generate.hpp"
#include "pdqp/kkt.hpp"
#include "pdqp/oracle.hpp"
#include "pdqp/primal.hpp"

#include <vector>

using namespace pdqp;
using namespace pdqp::test;

namespace {

struct Collected {
  std::vector<TraceRecord> steps;
  std::vector<BoundaryRecord> boundaries;
  TraceSink sink;

  Collected() {
    sink.on_step = [this](const TraceRecord& r) { steps.push_back(r); };
    sink.on_boundary = [this](const BoundaryRecord& b) { boundaries.push_back(b); };
  }
};

}  // namespace

TEST_CASE("base step on P1") {
  const QpProblem a = p1();
  const Shifts zero = Shifts::zero(2);
  Partition part = Partition::from_basis(2, {1});
  Iterate it{vec({0, 1}), vec({1}), vec({-1, 0})};
  const StepResult r = primal_base(a, zero, part, it, 0);
  CHECK(r.alpha_star == 0.5);
  CHECK(r.alpha_max == 1);
  CHECK(r.alpha == 0.5);
  CHECK(r.hit_target);
  CHECK_FALSE(r.blocking.has_value());
  CHECK(near(it.x, vec({0.5, 0.5})));
  CHECK(near(it.y, vec({0.5})));
  CHECK(it.z[0] == 0);
  CHECK(part == Partition::from_basis(2, {0, 1}));
}

TEST_CASE("unbounded base step") {
  const QpProblem u = h0_unbounded();
  const Shifts zero = Shifts::zero(2);
  Partition part = Partition::from_basis(2, {1});
  Iterate it{Vector::Zero(2), Vector::Zero(1), vec({-1, 0})};
  const StepResult r = primal_base(u, zero, part, it, 0);
  CHECK(r.alpha_star == kInf);
  CHECK(r.alpha_max == kInf);
  CHECK(r.unbounded());

  const PrimalOutcome out = solve_primal(u, zero, {Vector::Zero(2), Vector::Zero(1), vec({-1, 0})},
                                         Partition::from_basis(2, {1}));
  CHECK(out.status == Status::DualInfeasible);
  CHECK(out.subiterations == 1);
  REQUIRE(out.certificate.has_value());
  CHECK(near(out.certificate->dx, vec({1, 1})));
}

TEST_CASE("guard: z_l + r_l = 0 is not a step") {
  const QpProblem a = p1();
  Partition part = Partition::from_basis(2, {1});
  Iterate it{vec({0, 1}), vec({1}), vec({0, 0})};
  CHECK_THROWS_AS(primal_base(a, Shifts::zero(2), part, it, 0), PreconditionError);
}

TEST_CASE("P2 from B = {1}: blocked base step then an intermediate step") {
  const QpProblem a = p2();
  Collected c;
  const PrimalOutcome out = solve_primal(a, Shifts::zero(2), {vec({1, 0}), vec({3}), vec({0, -3})},
                                         Partition::from_basis(2, {0}), {}, &c.sink);
  REQUIRE(out.status == Status::Optimal);
  CHECK(near(out.iterate.x, vec({0, 1})));
  CHECK(near(out.iterate.y, vec({1})));
  CHECK(near(out.iterate.z, vec({1, 0})));
  CHECK(primal_objective(a, Shifts::zero(2), out.iterate) == doctest::Approx(0.5));
  CHECK(out.iterations == 1);
  REQUIRE(c.steps.size() == 2);
  CHECK(c.steps[0].kind == StepKind::Base);
  CHECK(c.steps[0].l == 1);
  CHECK(c.steps[0].step.blocking == Index{0});
  CHECK(c.steps[0].step.alpha == doctest::Approx(1));
  CHECK(c.steps[1].kind == StepKind::Intermediate);
  CHECK(c.steps[1].step.hit_target);
  CHECK(c.steps[1].step.alpha == doctest::Approx(1));
  CHECK(c.steps[1].direction.dz_l() == 1);
}

TEST_CASE("already optimal start takes no iterations") {
  const QpProblem a = p1();
  const PrimalOutcome out =
      solve_primal(a, Shifts::zero(2), {vec({0.5, 0.5}), vec({0.5}), vec({0, 0})},
                   Partition::from_basis(2, {0, 1}));
  CHECK(out.status == Status::Optimal);
  CHECK(out.iterations == 0);
}

TEST_CASE("infeasible start is rejected") {
  CHECK_THROWS_AS(solve_primal(p1(), Shifts::zero(2), {vec({-1, 2}), vec({0}), vec({0, 0})},
                               Partition::from_basis(2, {0, 1})),
                  PreconditionError);
}

TEST_CASE("iteration limit") {
  Limits lim;
  lim.max_iterations = 0;
  const PrimalOutcome out = solve_primal(p2(), Shifts::zero(2),
                                         {vec({1, 0}), vec({3}), vec({0, -3})},
                                         Partition::from_basis(2, {0}), lim);
  CHECK(out.status == Status::IterationLimit);
}

TEST_CASE("properties along random primal solves") {
  std::mt19937_64 rng(11);
  int solved = 0;
  for (int t = 0; t < 150; ++t) {
    RandomQpOptions opt;
    opt.n = 3 + t % 5;
    opt.m = 1 + t % 2;
    opt.curvature = static_cast<Curvature>(t % 3);
    opt.integer_data = t % 4 == 0;
    std::optional<QpProblem> prob;
    try {
      prob = random_qp(rng, opt);
    } catch (const ModelError&) {
      continue;
    }
    const QpProblem& p = *prob;
    // A primal feasible start: the oracle's primal set is nonempty, so move
    // to a vertex with an SOC basis via the driver's first stage instead.
    const Partition part = find_soc_basis(p).partition;
    Iterate it{Vector::Zero(p.n()), Vector::Zero(p.m()), Vector::Zero(p.n())};
    const auto fb = require_factor(factor_kb(p, part), "test");
    const std::vector<Index> B = part.basic();
    Vector rhs = Vector::Zero(static_cast<Index>(B.size()) + p.m());
    for (size_t k = 0; k < B.size(); ++k) rhs[static_cast<Index>(k)] = -p.c()[B[k]];
    rhs.tail(p.m()) = p.b();
    const Vector w = fb.solve(rhs);
    for (size_t k = 0; k < B.size(); ++k) it.x[B[k]] = w[static_cast<Index>(k)];
    it.y = -w.tail(p.m());
    it.z = p.H() * it.x + p.c() - p.A().transpose() * it.y;
    for (Index i : B) it.z[i] = 0;
    Shifts s = Shifts::zero(p.n());
    for (Index i : B) s.q[i] = std::max(-it.x[i], 0.0);

    Collected c;
    Limits lim;
    lim.bland_after = t % 2 ? 1 : 50;
    const PrimalOutcome out = solve_primal(p, s, it, part, lim, &c.sink);
    for (const auto& r : c.steps) {
      if (!std::isfinite(r.step.alpha)) continue;
      Iterate after = r.before;
      after.x += r.step.alpha * r.direction.dx;
      for (Index i = 0; i < p.n(); ++i) {
        if (r.partition.is_basic(i)) CHECK(after.x[i] >= lower_eff(p, s, i) - 1e-9);
        if (r.partition.is_nonbasic(i)) CHECK(after.x[i] == r.before.x[i]);
      }
      CHECK(r.f_primal <= primal_objective(p, s, r.before) + 1e-9 * (1 + std::abs(r.f_primal)));
    }
    for (const auto& b : c.boundaries)
      CHECK(std::holds_alternative<KktFactorization>(factor_kb(p, b.partition)));
    const OracleSolution ref = enumerate_solve(p, s);
    if (ref.status == Status::Optimal) {
      REQUIRE(out.status == Status::Optimal);
      CHECK(near(primal_objective(p, s, out.iterate), ref.objective, 1e-8));
      ++solved;
    } else {
      CHECK(out.status == ref.status);
    }
  }
  CHECK(solved > 50);
}
