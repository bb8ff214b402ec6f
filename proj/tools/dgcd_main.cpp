// Command-line front end: dgcd run|adapt|convergence|stationary|keys.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "dgcd/cli_io.hpp"

namespace fs = std::filesystem;
using namespace dgcd;

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string problem;
  std::string epsilon;
  std::string p;
  std::string output_dir;
  bool quiet = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config_path, "config file with 'key = value' lines");
  sub->add_option("-s,--set", o.sets, "override a config key (key=value), repeatable");
  sub->add_option("--problem", o.problem, "problem name");
  sub->add_option("--epsilon", o.epsilon, "diffusion coefficient");
  sub->add_option("--p", o.p, "polynomial degree");
  sub->add_option("-o,--output-dir", o.output_dir, "directory for CSV/VTK output");
  sub->add_flag("-q,--quiet", o.quiet, "no per-step progress");
}

RunConfig load(const std::string& subcommand, const Options& o) {
  std::map<std::string, std::string> ov;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + s + "'");
    ov[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (!o.problem.empty()) ov["problem"] = o.problem;
  if (!o.epsilon.empty()) ov["epsilon"] = o.epsilon;
  if (!o.p.empty()) ov["p"] = o.p;
  if (!o.output_dir.empty()) ov["output_dir"] = o.output_dir;
  RunConfig c = o.config_path.empty() ? parse_config("", ov) : parse_config_file(o.config_path, ov);
  c.subcommand = subcommand;
  fs::create_directories(c.output_dir);
  return c;
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
  const fs::path path = fs::path(c.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

int time_dependent(const RunConfig& c, bool adaptive, bool quiet) {
  const ProblemDefinition pb = problem_from(c);
  AdaptConfig ac = adapt_config_from(c);
  if (!adaptive) ac.initol = ac.ttol = ac.stola = kInf;
  const fs::path dir(c.output_dir);
  int snapshot = 0;
  std::vector<double> last_indicators;
  const auto observer = [&](const TimeSlab& slab, const StepTerms& terms, const StepRecord& rec) {
    if (!quiet)
      std::printf("step %5d  t=%-12.6g tau=%-11.4g cells=%-7zu eta_S1=%-11.4g eta_T_hat=%-11.4g%s\n", rec.j, rec.t,
                  rec.tau, rec.cells, rec.eta_S1, rec.eta_T_hat, rec.mesh_changed ? "  [mesh changed]" : "");
    last_indicators = terms.indicators;
    if (c.vtk_interval > 0 && (rec.j + 1) % c.vtk_interval == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%05d.vtk", snapshot++);
      write_vtk((dir / name).string(), slab.u_new, terms.indicators, pb.name);
    }
  };
  const AdaptResult r = run_algorithm1(pb, ac, observer);
  {
    auto out = open_out(c, "steps.csv");
    write_steps_csv(out, r.steps);
  }
  {
    auto out = open_out(c, "summary.csv");
    write_summary_csv(out, r);
  }
  if (last_indicators.empty()) last_indicators.assign(r.final_solution.space.mesh().num_cells(), 0.0);
  write_vtk((dir / "final.vtk").string(), r.final_solution, last_indicators, pb.name);
  std::ostringstream summary;
  write_summary_csv(summary, r);
  std::cout << summary.str();
  return 0;
}

int convergence(const RunConfig& c, bool quiet) {
  const ProblemDefinition pb = problem_from(c);
  const auto rows = convergence_study(pb, adapt_config_from(c), c.levels, [&](const ConvergenceRow& row) {
    if (!quiet)
      std::printf("level: %d steps, total dofs %s, estimator %s, error %s\n", row.timesteps,
                  format_number(row.total_dofs).c_str(), format_number(row.estimator).c_str(),
                  format_number(row.error).c_str());
  });
  auto out = open_out(c, "convergence.csv");
  write_convergence_csv(out, rows);
  write_convergence_csv(std::cout, rows);
  return 0;
}

int stationary(const RunConfig& c) {
  const ProblemDefinition pb = problem_from(c);
  const auto rows = stationary_study(pb, adapt_config_from(c), c.levels);
  auto out = open_out(c, "stationary.csv");
  write_stationary_csv(out, rows);
  write_stationary_csv(std::cout, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive dG solver for time-dependent convection-diffusion"};
  app.require_subcommand(1);
  Options o;
  auto* run = app.add_subcommand("run", "uniform time steps on a fixed mesh");
  auto* adapt = app.add_subcommand("adapt", "space-time adaptive run");
  auto* conv = app.add_subcommand("convergence", "uniform space-time refinement ladder");
  auto* stat = app.add_subcommand("stationary", "stationary solve and estimator under uniform refinement");
  auto* keys = app.add_subcommand("keys", "list the config keys");
  for (auto* s : {run, adapt, conv, stat}) add_common(s, o);
  CLI11_PARSE(app, argc, argv);

  try {
    if (keys->parsed()) {
      for (const auto& k : config_keys()) std::cout << k << '\n';
      return 0;
    }
    if (run->parsed()) return time_dependent(load("run", o), false, o.quiet);
    if (adapt->parsed()) return time_dependent(load("adapt", o), true, o.quiet);
    if (conv->parsed()) return convergence(load("convergence", o), o.quiet);
    if (stat->parsed()) return stationary(load("stationary", o));
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
