// Command-line front end: solve problem files, compare run logs, generate
// test problems.

#include "pdqp/generate.hpp"
#include "pdqp/problem_file.hpp"
#include "pdqp/runlog.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace pdqp;

namespace {

int do_run(const std::vector<std::string>& files, const std::string& strategy, RunFlags flags,
           const std::string& expect) {
  const auto st = strategy_from_string(strategy);
  if (!st) {
    std::cerr << "unknown strategy " << strategy << "\n";
    return 2;
  }
  flags.strategy = *st;
  if (!expect.empty()) flags.expectations = expect;
  const RunResult res = run(files, flags);
  std::cout << res.log.to_csv();
  for (const auto& p : res.problems) std::cerr << p << "\n";
  return res.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual active-set solver for convex quadratic programs"};
  app.require_subcommand(1);

  RunFlags flags;
  std::vector<std::string> files;
  std::string strategy = "auto", expect;
  auto* solve = app.add_subcommand("solve", "Solve problem files and print the run log");
  solve->alias("run");
  solve->add_option("files", files, "QPT problem files")->required()->check(CLI::ExistingFile);
  solve->add_option("--strategy", strategy,
                    "auto|primal-first|dual-first|primal-only|dual-only")
      ->capture_default_str();
  solve->add_option("--opt-tol", flags.opt_tol, "optimality tolerance")->capture_default_str();
  solve->add_option("--fea-tol", flags.fea_tol, "feasibility tolerance")->capture_default_str();
  solve->add_option("--max-iter", flags.max_iter, "iteration limit")->capture_default_str();
  solve->add_flag("--trace", flags.trace, "write <name>.trace.csv per problem (needs --out)");
  solve->add_option("--out", flags.out_dir, "directory for runlog.csv and solution files");
  solve->add_option("--expect", expect, "expectations file (name status per line)")
      ->check(CLI::ExistingFile);
  solve->add_option("--jobs", flags.jobs, "problems solved in parallel")->capture_default_str();

  std::string log_a, log_b, prof_out, label_a = "A", label_b = "B";
  auto* prof = app.add_subcommand("profile", "Performance profile data from two run logs");
  prof->add_option("log_a", log_a)->required()->check(CLI::ExistingFile);
  prof->add_option("log_b", log_b)->required()->check(CLI::ExistingFile);
  prof->add_option("--out", prof_out, "output file (default stdout)");
  prof->add_option("--label-a", label_a)->capture_default_str();
  prof->add_option("--label-b", label_b)->capture_default_str();

  Index gen_n = 500, gen_m = 50;
  std::uint64_t seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Write a strictly convex test problem");
  gen->add_option("--n", gen_n, "variables")->capture_default_str();
  gen->add_option("--m", gen_m, "constraint rows")->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out", gen_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      if (flags.trace && flags.out_dir.empty()) {
        std::cerr << "--trace needs --out\n";
        return 2;
      }
      return do_run(files, strategy, flags, expect);
    }
    if (*prof) {
      const ProfileData data =
          profile(RunLog::read(log_a), RunLog::read(log_b), label_a, label_b);
      if (prof_out.empty()) {
        std::cout << data.to_csv();
      } else {
        std::ofstream out(prof_out);
        out << data.to_csv();
        if (!out) throw std::runtime_error("cannot write " + prof_out);
      }
      return 0;
    }
    if (*gen) {
      write_problem_file(large_convex_problem(gen_n, gen_m, seed).qp, gen_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
