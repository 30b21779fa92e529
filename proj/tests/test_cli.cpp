#include "common.hpp"

#include "pdqp/oracle.hpp"
#include "pdqp/problem_file.hpp"
#include "pdqp/runlog.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pdqp;
using namespace pdqp::test;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> fixture_files() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(kFixtures))
    if (e.path().extension() == ".qpt") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

RunRow row(const std::string& name, int iters, Status st = Status::Optimal) {
  RunRow r;
  r.name = name;
  r.stage1_iters = iters;
  r.status = st;
  return r;
}

}  // namespace

TEST_CASE("parse P1") {
  const GeneralQp g = parse_problem(kFixtures + "/p1.qpt");
  CHECK(g.name == "p1");
  CHECK(g.n() == 2);
  CHECK(g.m() == 1);
  CHECK(g.Hhat == Matrix::Identity(2, 2));
  CHECK(g.Ahat == Matrix::Ones(1, 2));
  CHECK(g.lower == vec({0, 0, 1}));
  CHECK(g.upper[0] == kInf);
  CHECK(g.upper[2] == 1);
}

TEST_CASE("defaults and triplets") {
  const GeneralQp g = parse_problem_text(
      "QPT 1\n"
      "dims 2 1\n"
      "hessian triplet 2\n"
      "1 1 2\n"
      "2 1 -1\n"
      "constraints triplet 1\n"
      "1 2 3\n"
      "lower -inf 0 -1\n"
      "end\n",
      "t");
  CHECK(g.name.empty());
  CHECK(g.Hhat(0, 1) == -1);
  CHECK(g.Hhat(1, 0) == -1);
  CHECK(g.Ahat(0, 1) == 3);
  CHECK(g.Ahat(0, 0) == 0);
  CHECK(g.c.isZero());
  CHECK(g.lower[0] == -kInf);
  CHECK(g.upper == vec({kInf, kInf, kInf}));
}

TEST_CASE("parse errors name the line") {
  auto fails_at = [](const std::string& text, int line) {
    try {
      parse_problem_text(text, "bad");
    } catch (const ParseError& e) {
      CAPTURE(e.what());
      CHECK(e.line() == line);
      CHECK(std::string(e.what()).find("bad:" + std::to_string(line)) != std::string::npos);
      return;
    }
    FAIL("no error");
  };
  fails_at("QPT 1\ndims 2 1\nhessian triplet 1\n1 x 2\nend\n", 4);
  fails_at("QPT 1\ndims 2 1\nhessian triplet 2\n1 1 2\n1 1 3\nend\n", 5);
  fails_at("QPT 1\ndims 2 1\nhessian dense\n1 2\n0 1\nend\n", 5);
  fails_at("QPT 1\ndims 2 1\nhessian triplet 2\n2 1 1\n1 2 2\nend\n", 5);
  fails_at("QPT 1\ndims 2 1\nobjective 1 2 3\nend\n", 3);
  fails_at("QPT 1\ndims 2 1\nobjective 1 2\nobjective 1 2\nend\n", 4);
  fails_at("QPT 2\n", 1);
  fails_at("QPT 1\nobjective 1 2\n", 2);
  CHECK_THROWS_AS(parse_problem_text("QPT 1\ndims 2 1\n", "bad"), ParseError);
  CHECK_THROWS_AS(parse_problem(kFixtures + "/missing.qpt"), ModelError);
}

TEST_CASE("write then parse reproduces every fixture") {
  for (const auto& path : fixture_files()) {
    CAPTURE(path);
    const GeneralQp g = parse_problem(path);
    const GeneralQp back = parse_problem_text(write_problem(g), "round");
    CHECK(same_data(g, back));
    CHECK(back.name == g.name);
  }
  for (double v : {0.1, -1e-300, 1.0 / 3, 6.02214076e23, kInf, -kInf})
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
}

TEST_CASE("expectations agree with the oracle") {
  const auto expect = read_expectations(kFixtures + "/expectations.txt");
  const auto files = fixture_files();
  CHECK(expect.size() == files.size());
  for (const auto& path : files) {
    const GeneralQp g = parse_problem(path);
    CAPTURE(g.name);
    REQUIRE(expect.count(g.name) == 1);
    const StandardForm sf = standardize(g);
    const OracleSolution ref = enumerate_solve(sf.problem, Shifts::zero(sf.problem.n()));
    CHECK(ref.status == expect.at(g.name));
  }
}

TEST_CASE("run is deterministic and writes its outputs") {
  const fs::path dir = fs::temp_directory_path() / "pdqp_test_cli_run";
  fs::remove_all(dir);
  RunFlags flags;
  flags.out_dir = dir.string();
  flags.trace = true;
  flags.expectations = kFixtures + "/expectations.txt";
  const RunResult r1 = run(fixture_files(), flags);
  CHECK(r1.ok);
  for (const auto& msg : r1.problems) CAPTURE(msg);
  CHECK(fs::exists(dir / "runlog.csv"));
  CHECK(fs::exists(dir / "p1.sol"));
  CHECK(fs::exists(dir / "p1.trace.csv"));

  flags.jobs = 4;
  flags.out_dir.clear();
  const RunResult r2 = run(fixture_files(), flags);
  CHECK(r1.log.to_csv(false) == r2.log.to_csv(false));

  const RunLog back = RunLog::read((dir / "runlog.csv").string());
  CHECK(back.to_csv(false) == r1.log.to_csv(false));
  fs::remove_all(dir);
}

TEST_CASE("iteration limit fails the run") {
  RunFlags flags;
  flags.max_iter = 1;
  const RunResult r = run({kFixtures + "/box3.qpt"}, flags);
  REQUIRE(r.log.rows.size() == 1);
  CHECK(r.log.rows[0].status == Status::IterationLimit);
  CHECK_FALSE(r.ok);
}

TEST_CASE("profile worked example") {
  RunLog a, b;
  a.rows = {row("p1", 2), row("p2", 8)};
  b.rows = {row("p1", 4), row("p2", 4)};
  const ProfileData pd = profile(a, b);
  REQUIRE(pd.points.size() == 4);
  CHECK(pd.points[0].tau == 1);
  CHECK(pd.points[0].fraction == 0.5);
  CHECK(pd.points[1].tau == 2);
  CHECK(pd.points[1].fraction == 1);
  REQUIRE(pd.factors.size() == 2);
  CHECK(pd.factors[0].factor == -1);
  CHECK(pd.factors[1].factor == 1);

  RunLog bf = b;
  bf.rows[0].status = Status::IterationLimit;
  const ProfileData f = profile(a, bf);
  CHECK(f.factors[0].flag == "fail:B");
  CHECK(f.factors[0].factor == -kInf);
  RunLog af = a;
  af.rows[0].status = Status::InvalidStart;
  CHECK(profile(af, bf).factors[0].flag == "fail:both");

  // Zero counts become one.
  a.rows[0].stage1_iters = 0;
  b.rows[0].stage1_iters = 0;
  CHECK(profile(a, b).factors[0].factor == 0);

  CHECK(pd.to_csv().rfind("kind,label,tau_or_factor,fraction,flag", 0) == 0);
}

TEST_CASE("profile rejects mismatched problem sets") {
  RunLog a, b;
  a.rows = {row("p1", 1)};
  b.rows = {row("p2", 1)};
  CHECK_THROWS_AS(profile(a, b), ModelError);
}

TEST_CASE("runlog csv round-trip") {
  RunLog a;
  a.rows = {row("x", 3, Status::DualInfeasible)};
  a.rows[0].objective = -1.5;
  a.rows[0].millis = 2.25;
  const RunLog b = RunLog::from_csv(a.to_csv());
  REQUIRE(b.rows.size() == 1);
  CHECK(b.rows[0].status == Status::DualInfeasible);
  CHECK(b.rows[0].objective == -1.5);
  CHECK(b.rows[0].millis == 2.25);
  CHECK_THROWS_AS(RunLog::from_csv("nope\n"), ModelError);
}
