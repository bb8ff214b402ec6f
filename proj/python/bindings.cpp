#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dgcd/cli_io.hpp"

namespace py = pybind11;
using namespace dgcd;

namespace {

std::optional<double> root(const std::optional<double>& sq) {
  if (!sq) return std::nullopt;
  return std::sqrt(*sq);
}

py::tuple rect_tuple(const Rect& r) { return py::make_tuple(r.x0, r.x1, r.y0, r.y1); }

std::vector<py::tuple> mesh_cells(const MeshView& m) {
  std::vector<py::tuple> out;
  out.reserve(m.num_cells());
  for (std::size_t k = 0; k < m.num_cells(); ++k) out.push_back(rect_tuple(m.cell_rect(k)));
  return out;
}

template <class F>
std::string to_text(F&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Adaptive interior-penalty dG solver for unsteady convection-diffusion-reaction";
  py::register_exception<Error>(mod, "DGCDError", PyExc_ValueError);
  py::register_exception<SolverError>(mod, "SolverError", PyExc_RuntimeError);

  py::class_<ProblemDefinition>(mod, "Problem")
      .def_readonly("name", &ProblemDefinition::name)
      .def_readonly("epsilon", &ProblemDefinition::epsilon)
      .def_readwrite("final_time", &ProblemDefinition::final_time)
      .def_readonly("beta", &ProblemDefinition::beta)
      .def_property_readonly("domain", [](const ProblemDefinition& p) { return rect_tuple(p.domain); })
      .def_property_readonly("has_exact", [](const ProblemDefinition& p) { return p.exact.has_value(); })
      .def("forcing", [](const ProblemDefinition& p, double x, double y, double t) { return p.forcing(x, y, t); })
      .def("wind",
           [](const ProblemDefinition& p, double x, double y, double t) {
             const Vec2 a = p.wind(x, y, t);
             return py::make_tuple(a.x, a.y);
           })
      .def("reaction", [](const ProblemDefinition& p, double x, double y, double t) { return p.reaction(x, y, t); })
      .def("initial", [](const ProblemDefinition& p, double x, double y) { return p.initial(x, y); })
      .def("exact",
           [](const ProblemDefinition& p, double x, double y, double t) {
             if (!p.exact) throw Error("problem '" + p.name + "' has no exact solution");
             return p.exact->value(x, y, t);
           })
      .def("__repr__", [](const ProblemDefinition& p) {
        return "<Problem " + p.name + " epsilon=" + format_number(p.epsilon) + ">";
      });

  mod.def("make_problem", &make_problem, py::arg("name"), py::arg("epsilon"));

  py::class_<AdaptConfig>(mod, "AdaptConfig")
      .def(py::init<>())
      .def_readwrite("p", &AdaptConfig::p)
      .def_readwrite("gamma", &AdaptConfig::gamma)
      .def_readwrite("mesh0", &AdaptConfig::mesh0)
      .def_readwrite("n_steps", &AdaptConfig::n_steps)
      .def_readwrite("initol", &AdaptConfig::initol)
      .def_readwrite("ttol", &AdaptConfig::ttol)
      .def_readwrite("stola", &AdaptConfig::stola)
      .def_readwrite("stolb", &AdaptConfig::stolb)
      .def_readwrite("ref_pct", &AdaptConfig::ref_pct)
      .def_readwrite("coar_pct", &AdaptConfig::coar_pct)
      .def_readwrite("m", &AdaptConfig::m)
      .def_readwrite("compute_error", &AdaptConfig::compute_error)
      .def_property(
          "solver_tol", [](const AdaptConfig& c) { return c.solver.tolerance; },
          [](AdaptConfig& c, double v) { c.solver.tolerance = v; })
      .def_property(
          "preconditioner", [](const AdaptConfig& c) { return to_string(c.solver.preconditioner); },
          [](AdaptConfig& c, const std::string& v) { c.solver.preconditioner = parse_preconditioner(v); })
      .def("validate", &AdaptConfig::validate);

  py::class_<StepRecord>(mod, "StepRecord")
      .def_readonly("j", &StepRecord::j)
      .def_readonly("t", &StepRecord::t)
      .def_readonly("tau", &StepRecord::tau)
      .def_readonly("lambda_", &StepRecord::lambda)
      .def_readonly("cells", &StepRecord::cells)
      .def_readonly("eta_S1", &StepRecord::eta_S1)
      .def_readonly("eta_T_hat", &StepRecord::eta_T_hat)
      .def_readonly("mesh_changed", &StepRecord::mesh_changed)
      .def_readonly("halvings", &StepRecord::halvings);

  py::class_<AdaptResult>(mod, "AdaptResult")
      .def_readonly("steps", &AdaptResult::steps)
      .def_readonly("total_dofs", &AdaptResult::total_dofs)
      .def_readonly("mesh_changes", &AdaptResult::mesh_changes)
      .def_readonly("initial_iterations", &AdaptResult::initial_iterations)
      .def_property_readonly("eta_I", [](const AdaptResult& r) { return std::sqrt(r.totals.eta_I_sq); })
      .def_property_readonly("eta_S", [](const AdaptResult& r) { return std::sqrt(r.totals.eta_S_sq); })
      .def_property_readonly("eta_T", [](const AdaptResult& r) { return std::sqrt(r.totals.eta_T_sq); })
      .def_property_readonly("eta", [](const AdaptResult& r) { return std::sqrt(r.totals.eta_sq); })
      .def_property_readonly("error",
                             [](const AdaptResult& r) {
                               return r.error ? std::optional<double>(std::sqrt(r.error->total_sq)) : std::nullopt;
                             })
      .def_property_readonly("effectivity",
                             [](const AdaptResult& r) -> std::optional<double> {
                               if (!r.error) return std::nullopt;
                               const Effectivity e = effectivity(r.totals.eta_sq, r.error->total_sq);
                               if (e.kind != Effectivity::Kind::Value) return std::nullopt;
                               return e.value;
                             })
      .def_property_readonly("final_cells",
                             [](const AdaptResult& r) { return mesh_cells(r.final_solution.space.mesh()); })
      .def_property_readonly("final_means",
                             [](const AdaptResult& r) {
                               std::vector<double> m(r.final_solution.space.mesh().num_cells());
                               for (std::size_t k = 0; k < m.size(); ++k) m[k] = r.final_solution.cell_mean(k);
                               return m;
                             })
      .def("evaluate", [](const AdaptResult& r, double x, double y) { return r.final_solution.value({x, y}); })
      .def("steps_csv", [](const AdaptResult& r) { return to_text([&](std::ostream& o) { write_steps_csv(o, r.steps); }); })
      .def("summary_csv", [](const AdaptResult& r) { return to_text([&](std::ostream& o) { write_summary_csv(o, r); }); });

  mod.def(
      "run",
      [](const ProblemDefinition& problem, const AdaptConfig& config) {
        py::gil_scoped_release release;
        return run_algorithm1(problem, config);
      },
      py::arg("problem"), py::arg("config"));

  py::class_<ConvergenceRow>(mod, "ConvergenceRow")
      .def_readonly("timesteps", &ConvergenceRow::timesteps)
      .def_readonly("total_dofs", &ConvergenceRow::total_dofs)
      .def_readonly("estimator", &ConvergenceRow::estimator)
      .def_readonly("est_ratio", &ConvergenceRow::est_ratio)
      .def_readonly("error", &ConvergenceRow::error)
      .def_readonly("err_ratio", &ConvergenceRow::err_ratio);

  mod.def(
      "convergence_study",
      [](const ProblemDefinition& problem, const AdaptConfig& base, int levels) {
        py::gil_scoped_release release;
        return convergence_study(problem, base, levels);
      },
      py::arg("problem"), py::arg("config"), py::arg("levels"));
  mod.def("convergence_csv", [](const std::vector<ConvergenceRow>& rows) {
    return to_text([&](std::ostream& o) { write_convergence_csv(o, rows); });
  });

  py::class_<StationaryRow>(mod, "StationaryRow")
      .def_readonly("cells", &StationaryRow::cells)
      .def_readonly("dofs", &StationaryRow::dofs)
      .def_readonly("estimator", &StationaryRow::estimator)
      .def_readonly("error", &StationaryRow::error);

  mod.def("stationary_study", &stationary_study, py::arg("problem"), py::arg("config"), py::arg("levels"),
          py::arg("t") = 0.0);

  py::class_<RunConfig>(mod, "RunConfig")
      .def_readonly("subcommand", &RunConfig::subcommand)
      .def_readonly("problem", &RunConfig::problem)
      .def_readonly("epsilon", &RunConfig::epsilon)
      .def_readonly("p", &RunConfig::p)
      .def_readonly("levels", &RunConfig::levels)
      .def("problem_definition", &problem_from)
      .def("adapt_config", &adapt_config_from);

  mod.def("parse_config", &parse_config, py::arg("text"),
          py::arg("overrides") = std::map<std::string, std::string>{});
  mod.def("config_keys", &config_keys);

  mod.def(
      "gauss_legendre",
      [](int q) {
        const Rule1D r = gauss_legendre(q);
        return py::make_tuple(r.points, r.weights);
      },
      py::arg("q"));
}
