#include "dgcd/cli_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace dgcd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw Error("config: '" + key + "' expects a number, got '" + v + "'");
  return d;
}

int to_int(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const long n = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw Error("config: '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<int>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("config: '" + key + "' expects true/false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"problem", [](RunConfig& c, const std::string&, const std::string& v) { c.problem = v; }},
      {"epsilon", [](RunConfig& c, const std::string& k, const std::string& v) { c.epsilon = to_double(k, v); }},
      {"p", [](RunConfig& c, const std::string& k, const std::string& v) { c.p = to_int(k, v); }},
      {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.gamma = to_double(k, v); }},
      {"mesh0", [](RunConfig& c, const std::string& k, const std::string& v) { c.mesh0 = to_int(k, v); }},
      {"n_steps", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_steps = to_int(k, v); }},
      {"levels", [](RunConfig& c, const std::string& k, const std::string& v) { c.levels = to_int(k, v); }},
      {"final_time",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.final_time = to_double(k, v); }},
      {"initol", [](RunConfig& c, const std::string& k, const std::string& v) { c.initol = to_double(k, v); }},
      {"ttol", [](RunConfig& c, const std::string& k, const std::string& v) { c.ttol = to_double(k, v); }},
      {"stola", [](RunConfig& c, const std::string& k, const std::string& v) { c.stola = to_double(k, v); }},
      {"stolb", [](RunConfig& c, const std::string& k, const std::string& v) { c.stolb = to_double(k, v); }},
      {"ref_pct", [](RunConfig& c, const std::string& k, const std::string& v) { c.ref_pct = to_double(k, v); }},
      {"coar_pct", [](RunConfig& c, const std::string& k, const std::string& v) { c.coar_pct = to_double(k, v); }},
      {"m", [](RunConfig& c, const std::string& k, const std::string& v) { c.m = to_double(k, v); }},
      {"quad_assembly",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.quad.assembly = to_int(k, v); }},
      {"quad_estimator",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.quad.estimator = to_int(k, v); }},
      {"quad_error", [](RunConfig& c, const std::string& k, const std::string& v) { c.quad.error = to_int(k, v); }},
      {"solver_tol",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.tolerance = to_double(k, v); }},
      {"solver_max_iter",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.max_iterations = to_int(k, v); }},
      {"solver_restart",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.restart = to_int(k, v); }},
      {"preconditioner",
       [](RunConfig& c, const std::string&, const std::string& v) { c.solver.preconditioner = parse_preconditioner(v); }},
      {"output_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"vtk_interval",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.vtk_interval = to_int(k, v); }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = static_cast<unsigned>(to_int(k, v)); }},
      {"compute_error",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.compute_error = to_bool(k, v); }},
  };
  return table;
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& [name, set] : setters())
    if (name == key) {
      set(c, key, value);
      return;
    }
  throw Error("config: unknown key '" + key + "'");
}

std::string ratio_cell(const std::optional<double>& r) { return r ? format_number(*r) : std::string(); }

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, set] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides) {
  RunConfig c;
  bool has_problem = false, has_eps = false, has_p = false;
  const auto note = [&](const std::string& key) {
    has_problem |= key == "problem";
    has_eps |= key == "epsilon";
    has_p |= key == "p";
  };
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    apply(c, key, trim(line.substr(eq + 1)));
    note(key);
  }
  for (const auto& [key, value] : overrides) {
    apply(c, key, trim(value));
    note(key);
  }
  if (!has_problem) throw Error("config: missing required key 'problem'");
  if (!has_eps) throw Error("config: missing required key 'epsilon'");
  if (!has_p) throw Error("config: missing required key 'p'");
  if (!(c.epsilon > 0.0)) throw Error("config: epsilon must be positive");
  if (c.p < 1 || c.p > 10) throw Error("config: p must lie in [1, 10]");
  if (c.levels < 1) throw Error("config: levels must be positive");
  if (!c.coar_pct) c.coar_pct = c.problem == "example3" ? 30.0 : 10.0;
  return c;
}

RunConfig parse_config_file(const std::string& path, const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

ProblemDefinition problem_from(const RunConfig& config) {
  ProblemDefinition pb = make_problem(config.problem, config.epsilon);
  if (config.final_time) {
    if (!(*config.final_time > 0.0)) throw Error("config: final_time must be positive");
    pb.final_time = *config.final_time;
  }
  return pb;
}

AdaptConfig adapt_config_from(const RunConfig& config) {
  AdaptConfig a;
  a.p = config.p;
  a.gamma = config.gamma;
  a.mesh0 = config.mesh0;
  a.n_steps = config.n_steps;
  a.initol = config.initol;
  a.ttol = config.ttol;
  a.stola = config.stola;
  a.stolb = config.stolb.value_or(-1.0);
  a.ref_pct = config.ref_pct;
  a.coar_pct = config.coar_pct.value_or(10.0);
  a.m = config.m;
  a.quad = config.quad;
  a.solver = config.solver;
  a.compute_error = config.compute_error;
  return a;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<ConvergenceRow> convergence_study(const ProblemDefinition& problem, const AdaptConfig& base, int levels,
                                              const std::function<void(const ConvergenceRow&)>& progress) {
  if (!problem.exact) throw Error("convergence study needs a problem with an exact solution");
  std::vector<ConvergenceRow> rows;
  MeshView mesh = MeshView::uniform(problem.domain, base.mesh0, base.mesh0);
  for (int l = 0; l < levels; ++l) {
    AdaptConfig c = base;
    c.n_steps = base.n_steps << l;
    c.initol = c.ttol = c.stola = kInf;
    c.compute_error = true;
    const AdaptResult r = run_algorithm1(problem, c, mesh);
    ConvergenceRow row;
    row.timesteps = static_cast<int>(r.steps.size());
    row.total_dofs = r.total_dofs;
    row.estimator = std::sqrt(r.totals.eta_sq);
    row.error = std::sqrt(r.error->total_sq);
    if (!rows.empty()) {
      row.est_ratio = row.estimator / rows.back().estimator;
      row.err_ratio = row.error / rows.back().error;
    }
    rows.push_back(row);
    if (progress) progress(row);
    if (l + 1 < levels) mesh = refine_uniformly(mesh);
  }
  return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "timesteps,total_dofs,estimator,est_ratio,error,err_ratio\n";
  for (const auto& r : rows)
    out << r.timesteps << ',' << format_number(r.total_dofs) << ',' << format_number(r.estimator) << ','
        << ratio_cell(r.est_ratio) << ',' << format_number(r.error) << ',' << ratio_cell(r.err_ratio) << '\n';
}

void write_steps_csv(std::ostream& out, const std::vector<StepRecord>& steps) {
  out << "j,t,tau,lambda,eta_S1,eta_T_hat,mesh_changed\n";
  for (const auto& s : steps)
    out << s.j << ',' << format_number(s.t) << ',' << format_number(s.tau) << ',' << s.lambda << ','
        << format_number(s.eta_S1) << ',' << format_number(s.eta_T_hat) << ',' << (s.mesh_changed ? 1 : 0) << '\n';
}

void write_summary_csv(std::ostream& out, const AdaptResult& result) {
  const EstimatorTotals& t = result.totals;
  out << "total_dofs,eta_I,eta_S,eta_T,eta,error,effectivity\n";
  out << format_number(result.total_dofs) << ',' << format_number(std::sqrt(t.eta_I_sq)) << ','
      << format_number(std::sqrt(t.eta_S_sq)) << ',' << format_number(std::sqrt(t.eta_T_sq)) << ','
      << format_number(std::sqrt(t.eta_sq)) << ',';
  if (result.error)
    out << format_number(std::sqrt(result.error->total_sq)) << ','
        << effectivity(t.eta_sq, result.error->total_sq).str();
  else
    out << ',';
  out << '\n';
}

std::vector<StationaryRow> stationary_study(const ProblemDefinition& problem, const AdaptConfig& base, int levels,
                                            double t) {
  const auto basis = std::make_shared<TensorBasis>(base.p);
  const AlphaWeights w = weights_for(problem);
  MeshView mesh = MeshView::uniform(problem.domain, base.mesh0, base.mesh0);
  std::vector<StationaryRow> rows;
  for (int l = 0; l < levels; ++l) {
    const DGSpace space(mesh, basis);
    const DGField u = stationary_solve(space, problem, base.gamma, t, base.quad, base.solver);
    StationaryRow row;
    row.cells = mesh.num_cells();
    row.dofs = space.num_dofs();
    row.estimator = std::sqrt(
        stationary_estimator(u, problem, base.gamma, w, base.quad.estimator_points(base.p), t).eta_sq);
    if (problem.exact)
      row.error = std::sqrt(energy_error_sq(u, *problem.exact, t, problem.epsilon, problem.beta, base.gamma,
                                            base.quad.error_points(base.p)));
    rows.push_back(row);
    if (l + 1 < levels) mesh = refine_uniformly(mesh);
  }
  return rows;
}

void write_stationary_csv(std::ostream& out, const std::vector<StationaryRow>& rows) {
  out << "cells,dofs,estimator,error,effectivity\n";
  for (const auto& r : rows) {
    out << r.cells << ',' << r.dofs << ',' << format_number(r.estimator) << ',';
    if (r.error)
      out << format_number(*r.error) << ',' << effectivity(r.estimator * r.estimator, *r.error * *r.error).str();
    else
      out << ',';
    out << '\n';
  }
}

void write_vtk(std::ostream& out, const MeshView& mesh, const std::vector<double>& solution_mean,
               const std::vector<double>& indicator, const std::string& title) {
  const std::size_t n = mesh.num_cells();
  if (solution_mean.size() != n || indicator.size() != n) throw Error("write_vtk: one value per cell expected");
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 4 * n << " double\n";
  for (std::size_t k = 0; k < n; ++k) {
    const Rect r = mesh.cell_rect(k);
    const double xs[4] = {r.x0, r.x1, r.x1, r.x0};
    const double ys[4] = {r.y0, r.y0, r.y1, r.y1};
    for (int i = 0; i < 4; ++i) out << format_number(xs[i]) << ' ' << format_number(ys[i]) << " 0\n";
  }
  out << "CELLS " << n << ' ' << 5 * n << '\n';
  for (std::size_t k = 0; k < n; ++k)
    out << "4 " << 4 * k << ' ' << 4 * k + 1 << ' ' << 4 * k + 2 << ' ' << 4 * k + 3 << '\n';
  out << "CELL_TYPES " << n << '\n';
  for (std::size_t k = 0; k < n; ++k) out << "9\n";
  out << "CELL_DATA " << n << '\n';
  out << "SCALARS solution_mean double 1\nLOOKUP_TABLE default\n";
  for (double v : solution_mean) out << format_number(v) << '\n';
  out << "SCALARS indicator double 1\nLOOKUP_TABLE default\n";
  for (double v : indicator) out << format_number(v) << '\n';
}

void write_vtk(const std::string& path, const DGField& u, const std::vector<double>& indicator,
               const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error("write_vtk: cannot open '" + path + "'");
  std::vector<double> means(u.space.mesh().num_cells());
  for (std::size_t k = 0; k < means.size(); ++k) means[k] = u.cell_mean(k);
  write_vtk(out, u.space.mesh(), means, indicator, title);
  if (!out) throw Error("write_vtk: write failed for '" + path + "'");
}

}  // namespace dgcd
