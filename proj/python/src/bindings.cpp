#include "pdqp/driver.hpp"
#include "pdqp/oracle.hpp"
#include "pdqp/problem_file.hpp"
#include "pdqp/runlog.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pdqp;

namespace {

Strategy parse_strategy(const std::string& s) {
  const auto st = strategy_from_string(s);
  if (!st) throw py::value_error("unknown strategy '" + s + "'");
  return *st;
}

SolveConfig make_config(const std::string& strategy, double eps_fea, double eps_opt, int max_iter,
                        const std::optional<std::vector<Index>>& basis) {
  SolveConfig cfg;
  cfg.strategy = parse_strategy(strategy);
  cfg.eps_fea = eps_fea;
  cfg.eps_opt = eps_opt;
  cfg.max_iterations = max_iter;
  cfg.initial_basis = basis;
  return cfg;
}

py::dict to_dict(const PdqpSolution& sol) {
  py::dict d;
  d["status"] = to_string(sol.status);
  d["x"] = sol.x;
  d["y"] = sol.y;
  d["z"] = sol.z;
  d["objective"] = sol.objective;
  d["strategy"] = to_string(sol.strategy);
  d["iterations"] = sol.iterations();
  d["subiterations"] = sol.subiterations();
  py::list stages;
  for (const auto& st : sol.stage_log) {
    py::dict s;
    s["stage"] = st.stage;
    s["method"] = to_string(st.method);
    s["status"] = to_string(st.status);
    s["iterations"] = st.iterations;
    s["subiterations"] = st.subiterations;
    stages.append(s);
  }
  d["stages"] = stages;
  d["basis"] = sol.partition.basic();
  if (sol.certificate) {
    py::dict c;
    c["dx"] = sol.certificate->dx;
    c["dy"] = sol.certificate->dy;
    c["dz"] = sol.certificate->dz;
    d["certificate"] = c;
  } else {
    d["certificate"] = py::none();
  }
  return d;
}

Vector or_default(const std::optional<Vector>& v, Index n, double fill) {
  return v ? *v : Vector::Constant(n, fill);
}

QpProblem standard_problem(const Matrix& H, const Matrix& M, const Matrix& A, const Vector& b,
                           const Vector& c, const std::optional<Vector>& lower,
                           const std::optional<Vector>& upper) {
  return QpProblem(H, M, A, b, c, or_default(lower, c.size(), 0.0),
                   or_default(upper, c.size(), kInf));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Primal-dual active-set solver for convex QPs";

  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  py::class_<GeneralQp>(m, "Problem")
      .def(py::init<>())
      .def(py::init([](Matrix H, Matrix A, Vector c, Vector lower, Vector upper, std::string name) {
             GeneralQp g{std::move(H), std::move(A), std::move(c), std::move(lower),
                         std::move(upper), std::move(name)};
             validate(g);
             return g;
           }),
           py::arg("H"), py::arg("A"), py::arg("c"), py::arg("lower"), py::arg("upper"),
           py::arg("name") = "")
      .def_readwrite("H", &GeneralQp::Hhat)
      .def_readwrite("A", &GeneralQp::Ahat)
      .def_readwrite("c", &GeneralQp::c)
      .def_readwrite("lower", &GeneralQp::lower)
      .def_readwrite("upper", &GeneralQp::upper)
      .def_readwrite("name", &GeneralQp::name)
      .def_property_readonly("n", &GeneralQp::n)
      .def_property_readonly("m", &GeneralQp::m)
      .def("__repr__", [](const GeneralQp& g) {
        return "<pdqp.Problem '" + g.name + "' n=" + std::to_string(g.n()) +
               " m=" + std::to_string(g.m()) + ">";
      });

  m.def("parse_problem", &parse_problem, py::arg("path"));
  m.def("parse_problem_text", &parse_problem_text, py::arg("text"),
        py::arg("origin") = "<string>");
  m.def("write_problem", &write_problem, py::arg("problem"));
  m.def("write_problem_file", &write_problem_file, py::arg("problem"), py::arg("path"));

  m.def(
      "solve",
      [](const GeneralQp& g, const std::string& strategy, double eps_fea, double eps_opt,
         int max_iter, const std::optional<std::vector<Index>>& basis) {
        const SolveConfig cfg = make_config(strategy, eps_fea, eps_opt, max_iter, basis);
        PdqpSolution sol;
        {
          py::gil_scoped_release release;
          sol = solve_pdqp(g, cfg);
        }
        return to_dict(sol);
      },
      py::arg("problem"), py::arg("strategy") = "auto", py::arg("eps_fea") = 1e-6,
      py::arg("eps_opt") = 1e-6, py::arg("max_iter") = 100000,
      py::arg("initial_basis") = py::none());

  m.def(
      "solve_standard",
      [](const Matrix& H, const Matrix& M, const Matrix& A, const Vector& b, const Vector& c,
         const std::optional<Vector>& lower, const std::optional<Vector>& upper,
         const std::string& strategy, double eps_fea, double eps_opt, int max_iter,
         const std::optional<std::vector<Index>>& basis) {
        const QpProblem p = standard_problem(H, M, A, b, c, lower, upper);
        const SolveConfig cfg = make_config(strategy, eps_fea, eps_opt, max_iter, basis);
        PdqpSolution sol;
        {
          py::gil_scoped_release release;
          sol = solve_pdqp(p, cfg);
        }
        return to_dict(sol);
      },
      py::arg("H"), py::arg("M"), py::arg("A"), py::arg("b"), py::arg("c"),
      py::arg("lower") = py::none(), py::arg("upper") = py::none(),
      py::arg("strategy") = "auto", py::arg("eps_fea") = 1e-6, py::arg("eps_opt") = 1e-6,
      py::arg("max_iter") = 100000, py::arg("initial_basis") = py::none(),
      "Solve min ½xᵀHx + ½yᵀMy + cᵀx s.t. Ax + My = b, lower ≤ x ≤ upper.");

  m.def(
      "enumerate",
      [](const Matrix& H, const Matrix& M, const Matrix& A, const Vector& b, const Vector& c,
         const std::optional<Vector>& lower, const std::optional<Vector>& upper) {
        const QpProblem p = standard_problem(H, M, A, b, c, lower, upper);
        const OracleSolution o = enumerate_solve(p, Shifts::zero(p.n()));
        py::dict d;
        d["status"] = to_string(o.status);
        d["objective"] = o.objective;
        d["x"] = o.iterate.x;
        d["y"] = o.iterate.y;
        d["z"] = o.iterate.z;
        d["basis"] = o.witness.basic();
        d["primal_feasible"] = o.primal_feasible;
        d["dual_feasible"] = o.dual_feasible;
        d["partitions_tried"] = o.partitions_tried;
        return d;
      },
      py::arg("H"), py::arg("M"), py::arg("A"), py::arg("b"), py::arg("c"),
      py::arg("lower") = py::none(), py::arg("upper") = py::none(),
      "Brute-force reference solve over all partitions (n ≤ 16).");

  m.def(
      "profile",
      [](const std::string& csv_a, const std::string& csv_b, const std::string& label_a,
         const std::string& label_b) {
        const ProfileData pd =
            profile(RunLog::from_csv(csv_a), RunLog::from_csv(csv_b), label_a, label_b);
        py::list points, factors;
        for (const auto& pt : pd.points) points.append(py::make_tuple(pt.solver, pt.tau, pt.fraction));
        for (const auto& f : pd.factors) factors.append(py::make_tuple(f.problem, f.factor, f.flag));
        py::dict d;
        d["points"] = points;
        d["factors"] = factors;
        d["csv"] = pd.to_csv();
        return d;
      },
      py::arg("runlog_a"), py::arg("runlog_b"), py::arg("label_a") = "A",
      py::arg("label_b") = "B", "Performance profile of two runlog CSV texts.");

  m.attr("strategies") =
      py::make_tuple("auto", "primal-first", "dual-first", "primal-only", "dual-only");
}
