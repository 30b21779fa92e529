#pragma once

#include "pdqp/driver.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdqp {

struct RunFlags {
  Strategy strategy = Strategy::Auto;
  double opt_tol = 1e-6;
  double fea_tol = 1e-6;
  int max_iter = 100000;
  bool trace = false;
  std::string out_dir;  // empty: nothing written
  std::optional<std::string> expectations;
  int jobs = 1;
};

struct RunRow {
  std::string name;
  Index n = 0, m = 0;
  Status status = Status::Optimal;
  double objective = 0;
  Strategy strategy = Strategy::Auto;
  int stage1_iters = 0;
  int stage2_iters = 0;
  long subiters = 0;
  double millis = 0;
};

struct RunLog {
  std::vector<RunRow> rows;

  static constexpr const char* kHeader =
      "name,n,m,status,objective,strategy,stage1_iters,stage2_iters,subiters,millis";

  // with_time = false blanks the wall-time column (for determinism checks).
  std::string to_csv(bool with_time = true) const;
  static RunLog from_csv(const std::string& text, const std::string& origin = "<runlog>");
  static RunLog read(const std::string& path);
};

struct RunResult {
  RunLog log;
  std::vector<PdqpSolution> solutions;
  std::vector<std::string> problems;  // messages for failures and mismatches
  bool ok = true;
};

// Expectations file: one "name status" pair per line, '#' comments.
std::map<std::string, Status> read_expectations(const std::string& path);

// Solves every file, writes runlog.csv, <name>.sol and (with trace)
// <name>.trace.csv into out_dir. ok is false if a status is outside
// {Optimal, PrimalInfeasible, DualInfeasible} or differs from the
// expectations.
RunResult run(const std::vector<std::string>& paths, const RunFlags& flags);

RunRow run_one(const GeneralQp& g, const RunFlags& flags, PdqpSolution* sol = nullptr,
               std::string* trace_csv = nullptr);

std::string solution_text(const std::string& name, const PdqpSolution& sol);

struct ProfilePoint {
  std::string solver;
  double tau = 0;
  double fraction = 0;
};

struct OutperformFactor {
  std::string problem;
  double factor = 0;  // log2(iters_A / iters_B); +inf when only A failed
  std::string flag;   // "", "fail:A", "fail:B", "fail:both"
};

struct ProfileData {
  std::vector<ProfilePoint> points;
  std::vector<OutperformFactor> factors;

  std::string to_csv() const;
};

// Dolan–Moré profiles on stage-1 + stage-2 iterations and per-problem log2
// ratios. A run fails when its status is not Optimal, PrimalInfeasible or
// DualInfeasible. Zero iteration counts are treated as 1. Throws ModelError
// if the logs cover different problems.
ProfileData profile(const RunLog& a, const RunLog& b, const std::string& label_a = "A",
                    const std::string& label_b = "B");

}  // namespace pdqp
