#pragma once

#include "pdqp/driver.hpp"

#include <cstdint>
#include <random>

namespace pdqp {

enum class Curvature { PositiveDefinite, RankDeficient, Zero };
enum class Construction { Feasible, PrimalInfeasible, Unbounded };

const char* to_string(Curvature c);
const char* to_string(Construction c);

struct RandomQpOptions {
  Index n = 4;
  Index m = 2;
  Curvature curvature = Curvature::PositiveDefinite;
  double mu = 0;  // M = mu·I
  Construction kind = Construction::Feasible;
  // Small integers instead of Gaussian entries; produces ties and
  // degenerate vertices.
  bool integer_data = false;
};

// x ≥ 0 only. A primal-infeasible construction forces mu = 0 (a nonsingular
// M makes every right-hand side reachable). An unbounded construction needs
// m < n. May throw ModelError when integer data lose rank; callers redraw.
QpProblem random_qp(std::mt19937_64& rng, const RandomQpOptions& opt);

// Two-sided bounds on variables and rows, including free, fixed and
// equality entries.
GeneralQp random_general_qp(std::mt19937_64& rng, Index n, Index m, Curvature curvature,
                            Construction kind);

struct GeneratedProblem {
  GeneralQp qp;
  Vector x_opt;  // the optimum built into the data
};

// Strictly convex, box constraints plus m two-sided rows, with a planted
// optimum that has a fraction of the bounds and rows active.
GeneratedProblem large_convex_problem(Index n, Index m, std::uint64_t seed);

}  // namespace pdqp
