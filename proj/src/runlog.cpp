#include "pdqp/runlog.hpp"

#include "pdqp/problem_file.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace pdqp {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ModelError(where + ": bad number \"" + s + "\"");
}

long to_long(const std::string& s, const std::string& where) {
  try {
    size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ModelError(where + ": bad integer \"" + s + "\"");
}

bool terminal(Status s) {
  return s == Status::Optimal || s == Status::PrimalInfeasible || s == Status::DualInfeasible;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string join(const Vector& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

std::string RunLog::to_csv(bool with_time) const {
  std::ostringstream os;
  os << kHeader << "\n";
  for (const auto& r : rows) {
    if (r.name.find_first_of(",\n") != std::string::npos)
      throw ModelError("problem name \"" + r.name + "\" cannot appear in a CSV log");
    char ms[32] = "";
    if (with_time) std::snprintf(ms, sizeof ms, "%.3f", r.millis);
    os << r.name << ',' << r.n << ',' << r.m << ',' << to_string(r.status) << ','
       << format_double(r.objective) << ',' << to_string(r.strategy) << ',' << r.stage1_iters
       << ',' << r.stage2_iters << ',' << r.subiters << ',' << ms << "\n";
  }
  return os.str();
}

RunLog RunLog::from_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  RunLog log;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    if (!header) {
      if (line != kHeader) throw ModelError(where + ": unexpected header");
      header = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 10) throw ModelError(where + ": expected 10 columns");
    RunRow r;
    r.name = f[0];
    r.n = to_long(f[1], where);
    r.m = to_long(f[2], where);
    const auto st = status_from_string(f[3]);
    if (!st) throw ModelError(where + ": unknown status \"" + f[3] + "\"");
    r.status = *st;
    r.objective = to_double(f[4], where);
    const auto strat = strategy_from_string(f[5]);
    if (!strat) throw ModelError(where + ": unknown strategy \"" + f[5] + "\"");
    r.strategy = *strat;
    r.stage1_iters = static_cast<int>(to_long(f[6], where));
    r.stage2_iters = static_cast<int>(to_long(f[7], where));
    r.subiters = to_long(f[8], where);
    r.millis = f[9].empty() ? 0.0 : to_double(f[9], where);
    log.rows.push_back(r);
  }
  if (!header) throw ModelError(origin + ": empty run log");
  return log;
}

RunLog RunLog::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str(), path);
}

std::map<std::string, Status> read_expectations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, Status> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string name, status, extra;
    if (!(ls >> name)) continue;
    const std::string where = path + ":" + std::to_string(number);
    if (!(ls >> status) || (ls >> extra)) throw ModelError(where + ": expected \"name status\"");
    const auto st = status_from_string(status);
    if (!st) throw ModelError(where + ": unknown status \"" + status + "\"");
    out[name] = *st;
  }
  return out;
}

std::string solution_text(const std::string& name, const PdqpSolution& sol) {
  std::ostringstream os;
  os << "name " << name << "\n"
     << "status " << to_string(sol.status) << "\n"
     << "strategy " << to_string(sol.strategy) << "\n"
     << "objective " << format_double(sol.objective) << "\n"
     << "iterations " << sol.iterations() << "\n"
     << "x " << join(sol.x) << "\n"
     << "y " << join(sol.y) << "\n"
     << "z " << join(sol.z) << "\n";
  return os.str();
}

RunRow run_one(const GeneralQp& g, const RunFlags& flags, PdqpSolution* sol_out,
               std::string* trace_csv) {
  SolveConfig cfg;
  cfg.strategy = flags.strategy;
  cfg.eps_opt = flags.opt_tol;
  cfg.eps_fea = flags.fea_tol;
  cfg.max_iterations = flags.max_iter;

  TraceSink sink;
  std::ostringstream trace;
  if (trace_csv) {
    trace << "stage,method,iteration,subiteration,kind,l,alpha,alpha_star,alpha_max,blocking,"
             "f_primal,f_dual\n";
    sink.on_step = [&](const TraceRecord& r) {
      trace << r.stage << ',' << to_string(r.method) << ',' << r.iteration << ','
            << r.subiteration << ',' << to_string(r.kind) << ',' << r.l + 1 << ','
            << format_double(r.step.alpha) << ',' << format_double(r.step.alpha_star) << ','
            << format_double(r.step.alpha_max) << ','
            << (r.step.blocking ? std::to_string(*r.step.blocking + 1) : std::string()) << ','
            << format_double(r.f_primal) << ',' << format_double(r.f_dual) << "\n";
    };
    cfg.sink = &sink;
  }

  const auto t0 = std::chrono::steady_clock::now();
  PdqpSolution sol = solve_pdqp(g, cfg);
  const auto t1 = std::chrono::steady_clock::now();

  RunRow row;
  row.name = g.name;
  row.n = g.n();
  row.m = g.m();
  row.status = sol.status;
  row.objective = sol.objective;
  row.strategy = sol.strategy;
  row.stage1_iters = sol.stage_iterations(1);
  row.stage2_iters = sol.stage_iterations(2);
  row.subiters = sol.subiterations();
  row.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
  if (trace_csv) *trace_csv = trace.str();
  if (sol_out) *sol_out = std::move(sol);
  return row;
}

RunResult run(const std::vector<std::string>& paths, const RunFlags& flags) {
  std::vector<GeneralQp> problems;
  std::set<std::string> names;
  for (const auto& p : paths) {
    problems.push_back(parse_problem(p));
    if (!names.insert(problems.back().name).second)
      throw ModelError("duplicate problem name \"" + problems.back().name + "\"");
  }
  std::map<std::string, Status> expected;
  if (flags.expectations) expected = read_expectations(*flags.expectations);

  const size_t np = problems.size();
  RunResult res;
  res.log.rows.resize(np);
  res.solutions.resize(np);
  std::vector<std::string> traces(np);
  std::vector<std::exception_ptr> errors(np);

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < np;) {
      try {
        res.log.rows[i] = run_one(problems[i], flags, &res.solutions[i],
                                  flags.trace ? &traces[i] : nullptr);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(flags.jobs, static_cast<int>(np)));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (const auto& r : res.log.rows) {
    if (!terminal(r.status)) {
      res.ok = false;
      res.problems.push_back(r.name + ": status " + to_string(r.status));
    }
    if (flags.expectations) {
      auto it = expected.find(r.name);
      if (it == expected.end()) {
        res.ok = false;
        res.problems.push_back(r.name + ": no expectation recorded");
      } else if (it->second != r.status) {
        res.ok = false;
        res.problems.push_back(r.name + ": expected " + to_string(it->second) + ", got " +
                               to_string(r.status));
      }
    }
  }

  if (!flags.out_dir.empty()) {
    const std::filesystem::path dir(flags.out_dir);
    std::filesystem::create_directories(dir);
    write_text(dir / "runlog.csv", res.log.to_csv());
    for (size_t i = 0; i < np; ++i) {
      write_text(dir / (problems[i].name + ".sol"),
                 solution_text(problems[i].name, res.solutions[i]));
      if (flags.trace) write_text(dir / (problems[i].name + ".trace.csv"), traces[i]);
    }
  }
  return res;
}

std::string ProfileData::to_csv() const {
  std::ostringstream os;
  os << "kind,label,tau_or_factor,fraction,flag\n";
  for (const auto& p : points)
    os << "profile," << p.solver << ',' << format_double(p.tau) << ','
       << format_double(p.fraction) << ",\n";
  for (const auto& f : factors)
    os << "factor," << f.problem << ',' << format_double(f.factor) << ",," << f.flag << "\n";
  return os.str();
}

ProfileData profile(const RunLog& a, const RunLog& b, const std::string& label_a,
                    const std::string& label_b) {
  std::map<std::string, const RunRow*> by_b;
  for (const auto& r : b.rows)
    if (!by_b.emplace(r.name, &r).second) throw ModelError("duplicate problem " + r.name);
  std::set<std::string> seen_a;
  for (const auto& r : a.rows) {
    if (!seen_a.insert(r.name).second) throw ModelError("duplicate problem " + r.name);
    if (!by_b.count(r.name)) throw ModelError("problem " + r.name + " missing from the second log");
  }
  if (seen_a.size() != by_b.size())
    for (const auto& [name, row] : by_b)
      if (!seen_a.count(name)) throw ModelError("problem " + name + " missing from the first log");

  auto cost = [](const RunRow& r) -> double {
    if (!terminal(r.status)) return kInf;
    return std::max(1, r.stage1_iters + r.stage2_iters);
  };

  ProfileData out;
  std::vector<double> ra, rb;
  for (const auto& r : a.rows) {
    const RunRow& s = *by_b.at(r.name);
    const double ta = cost(r), tb = cost(s);
    const double best = std::min(ta, tb);
    ra.push_back(ta / best);
    rb.push_back(tb / best);

    OutperformFactor f{r.name, 0, ""};
    if (ta == kInf && tb == kInf) f.flag = "fail:both";
    else if (ta == kInf) f = {r.name, kInf, "fail:A"};
    else if (tb == kInf) f = {r.name, -kInf, "fail:B"};
    else f.factor = std::log2(ta / tb);
    out.factors.push_back(f);
  }

  std::set<double> taus;
  for (double t : ra)
    if (std::isfinite(t)) taus.insert(t);
  for (double t : rb)
    if (std::isfinite(t)) taus.insert(t);
  const double np = static_cast<double>(ra.size());
  for (const auto& [label, ratios] : {std::pair{label_a, &ra}, std::pair{label_b, &rb}})
    for (double tau : taus) {
      const auto hits = std::count_if(ratios->begin(), ratios->end(),
                                      [&](double r) { return r <= tau; });
      out.points.push_back({label, tau, static_cast<double>(hits) / np});
    }
  return out;
}

}  // namespace pdqp
