#pragma once

// Run configuration, experiment harnesses and CSV / legacy VTK output.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgcd/adaptivity.hpp"

namespace dgcd {

struct RunConfig {
  std::string subcommand = "run";  // run | convergence | adapt | stationary
  std::string problem;
  double epsilon = 0.0;
  int p = 0;
  double gamma = 10.0;
  int mesh0 = 8;
  int n_steps = 10;
  int levels = 1;
  std::optional<double> final_time;
  double initol = kInf;
  double ttol = kInf;
  double stola = kInf;
  std::optional<double> stolb;
  double ref_pct = 6.25;
  std::optional<double> coar_pct;  // 10, or 30 for example3
  double m = 1.0;
  QuadratureOrders quad;
  SolverConfig solver;
  std::string output_dir = ".";
  int vtk_interval = 0;  // write a snapshot every k steps (0: final only)
  unsigned seed = 0;
  bool compute_error = true;
};

/// Parses "key = value" lines ('#' starts a comment). `overrides` are applied
/// after the text, so command-line flags win over the file. Unknown keys and
/// malformed values throw; problem, epsilon and p are required.
RunConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides = {});
RunConfig parse_config_file(const std::string& path, const std::map<std::string, std::string>& overrides = {});

/// The documented keys, in the order they are listed by `dgcd keys`.
const std::vector<std::string>& config_keys();

ProblemDefinition problem_from(const RunConfig& config);
AdaptConfig adapt_config_from(const RunConfig& config);

/// %.9g
std::string format_number(double v);

struct ConvergenceRow {
  int timesteps = 0;
  double total_dofs = 0.0;
  double estimator = 0.0;
  std::optional<double> est_ratio;
  double error = 0.0;
  std::optional<double> err_ratio;
};

/// Level l (0-based) uses mesh0 refined l times and n_steps * 2^l uniform steps.
std::vector<ConvergenceRow> convergence_study(const ProblemDefinition& problem, const AdaptConfig& base, int levels,
                                              const std::function<void(const ConvergenceRow&)>& progress = {});
void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

void write_steps_csv(std::ostream& out, const std::vector<StepRecord>& steps);
void write_summary_csv(std::ostream& out, const AdaptResult& result);

struct StationaryRow {
  std::size_t cells = 0;
  std::size_t dofs = 0;
  double estimator = 0.0;
  std::optional<double> error;
};

/// Stationary solve + estimator on mesh0 refined 0..levels-1 times.
std::vector<StationaryRow> stationary_study(const ProblemDefinition& problem, const AdaptConfig& base, int levels,
                                            double t = 0.0);
void write_stationary_csv(std::ostream& out, const std::vector<StationaryRow>& rows);

void write_vtk(std::ostream& out, const MeshView& mesh, const std::vector<double>& solution_mean,
               const std::vector<double>& indicator, const std::string& title = "dgcd");
void write_vtk(const std::string& path, const DGField& u, const std::vector<double>& indicator,
               const std::string& title = "dgcd");

}  // namespace dgcd
