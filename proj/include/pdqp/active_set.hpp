#pragma once

#include "pdqp/model.hpp"

#include <functional>
#include <optional>
#include <string>

namespace pdqp {

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, IterationLimit, InvalidStart };

const char* to_string(Status s);
std::optional<Status> status_from_string(const std::string& s);

struct Limits {
  int max_iterations = 100000;
  // Zero means 20 × max_iterations + 1000.
  long max_subiterations = 0;
  // Consecutive zero-length steps before switching to least-index selection.
  int bland_after = 50;
  double eps_fea = 1e-6;
  double eps_opt = 1e-6;
  // Recompute x_B, y, z_N from the factored K_B at every iteration boundary.
  bool refresh = true;
  // Copied into trace records so a sink can tell stages apart.
  int stage = 0;
};

struct StepResult {
  double alpha = 0;
  double alpha_star = kInf;
  double alpha_max = kInf;
  std::optional<Index> blocking;
  bool hit_target = false;

  bool unbounded() const { return alpha == kInf; }
};

enum class Method : std::uint8_t { Primal, Dual };
enum class StepKind : std::uint8_t { Base, Intermediate, TemporarySwap };

const char* to_string(Method m);
const char* to_string(StepKind k);

struct TraceRecord {
  Method method = Method::Primal;
  StepKind kind = StepKind::Base;
  int stage = 0;
  int iteration = 0;
  long subiteration = 0;
  Index l = -1;
  StepResult step;
  double f_primal = 0;  // after the step
  double f_dual = 0;
  double stationarity = 0;
  double equality = 0;
  // State before the step. The partition has l freed.
  Iterate before;
  Partition partition;
  Direction direction;
  // Valid only for the duration of the callback.
  const QpProblem* problem = nullptr;
  const Shifts* shifts = nullptr;
};

// Emitted at each iteration boundary, after the basis was factored.
struct BoundaryRecord {
  Method method = Method::Primal;
  int stage = 0;
  int iteration = 0;
  Partition partition;
  Iterate iterate;
};

struct TraceSink {
  std::function<void(const TraceRecord&)> on_step;
  std::function<void(const BoundaryRecord&)> on_boundary;
};

struct MethodOutcome {
  Status status = Status::Optimal;
  Iterate iterate;
  Partition partition;
  int iterations = 0;
  long subiterations = 0;
  long degenerate_steps = 0;
  bool least_index_mode = false;
  // Direction along which the step was unbounded (infeasibility certificate).
  std::optional<Direction> certificate;
};

using PrimalOutcome = MethodOutcome;
using DualOutcome = MethodOutcome;

}  // namespace pdqp
