#pragma once

// Space-time adaptive driver: initial-mesh loop, time-step halving against a
// temporal tolerance, and fixed-fraction refine/coarsen limited by a counter.

#include <functional>
#include <limits>
#include <optional>

#include "dgcd/error_norms.hpp"
#include "dgcd/estimators.hpp"
#include "dgcd/time_stepper.hpp"

namespace dgcd {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct AdaptConfig {
  int p = 1;
  double gamma = 10.0;
  int mesh0 = 8;        // initial mesh is mesh0 x mesh0 roots
  int n_steps = 10;     // initial uniform schedule
  double initol = kInf;
  double ttol = kInf;
  double stola = kInf;  // a non-finite value switches spatial adaptivity off
  double stolb = -1.0;  // negative: stola / 5
  double ref_pct = 6.25;
  double coar_pct = 10.0;
  double m = 1.0;       // threshold = T / m
  double init_ref_pct = 10.0;
  double init_coar_pct = 5.0;
  int max_initial_iterations = 30;
  double min_tau_fraction = 1e-8;
  bool compute_error = true;
  int time_points = 3;
  QuadratureOrders quad;
  SolverConfig solver;

  double effective_stolb() const { return stolb >= 0.0 ? stolb : stola / 5.0; }
  void validate() const;
};

struct StepRecord {
  int j = 0;
  double t = 0.0;  // end of the step
  double tau = 0.0;
  std::size_t lambda = 0;  // DoFs of the overlay of mesh_j and mesh_{j+1}
  std::size_t cells = 0;   // cells of mesh_{j+1}
  double eta_S1 = 0.0;
  double eta_T_hat = 0.0;
  bool mesh_changed = false;
  int halvings = 0;
  double error_sq = 0.0;
};

struct AdaptResult {
  MeshView initial_mesh;
  int initial_iterations = 0;
  InitialEstimate initial;
  std::vector<StepRecord> steps;
  EstimatorLedger ledger;
  EstimatorTotals totals;
  std::optional<ErrorReport> error;
  double total_dofs = 0.0;
  int mesh_changes = 0;
  DGField final_solution;
};

using SlabObserver = std::function<void(const TimeSlab&, const StepTerms&, const StepRecord&)>;

/// Leaves of `mesh` ranked by indicator: the ceil(pct% * N) largest (ties by
/// ascending id) or smallest.
std::vector<NodeId> mark_top(const MeshView& mesh, const std::vector<double>& indicators, double pct);
std::vector<NodeId> mark_bottom(const MeshView& mesh, const std::vector<double>& indicators, double pct);

/// Refines the top `ref_pct` and then coarsens the bottom `coar_pct` (either may be 0).
MeshView refine_and_coarsen(const MeshView& mesh, const std::vector<double>& indicators, double ref_pct,
                            double coar_pct);

struct InitialMesh {
  MeshView mesh;
  DGField u0;
  InitialEstimate estimate;
  int iterations = 0;
};

InitialMesh initial_mesh_loop(const ProblemDefinition& problem, BackwardEuler& stepper, const MeshView& start,
                              const AdaptConfig& config);

/// Mesh change decided by the gate for an accepted step.
enum class GateAction { None, Refine, RefineCoarsen, Coarsen };
GateAction gate_action(double eta_S1, const AdaptConfig& config);

AdaptResult run_algorithm1(const ProblemDefinition& problem, const AdaptConfig& config,
                           const SlabObserver& observer = {});

/// Same driver from a caller-supplied initial mesh.
AdaptResult run_algorithm1(const ProblemDefinition& problem, const AdaptConfig& config, const MeshView& start,
                           const SlabObserver& observer = {});

}  // namespace dgcd
