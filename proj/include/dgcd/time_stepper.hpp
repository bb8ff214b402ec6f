#pragma once

// Backward Euler across possibly different consecutive meshes.

#include <optional>

#include "dgcd/dg_operator.hpp"
#include "dgcd/linear_solver.hpp"

namespace dgcd {

/// One accepted (or trial) step: u_old on mesh_j at t0, u_new on mesh_{j+1} at t1.
struct TimeSlab {
  int index = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  DGField u_old;
  DGField u_new;
  Overlay overlay;  // a = mesh_j, b = mesh_{j+1}

  double tau() const { return t1 - t0; }
};

TimeSlab make_slab(int index, double t0, double t1, DGField u_old, DGField u_new);

/// Vector (u_old, phi_i) over the basis of `space`, integrated on the overlay
/// of u_old's mesh with space's mesh using q points per direction.
Eigen::VectorXd cross_mesh_mass_rhs(const DGField& u_old, const DGSpace& space, int q);

struct StepperConfig {
  double gamma = 10.0;
  QuadratureOrders quad;
  SolverConfig solver;
};

/// Assembles and solves (M/tau + A(t1)) u = F(t1) + (u_old, .)/tau. Matrices are
/// cached per mesh (and per time for non-autonomous operators).
class BackwardEuler {
 public:
  BackwardEuler(ProblemDefinition problem, int degree, StepperConfig config = {});

  const ProblemDefinition& problem() const { return problem_; }
  const StepperConfig& config() const { return config_; }
  int degree() const { return basis_->degree(); }
  const std::shared_ptr<const TensorBasis>& basis() const { return basis_; }

  DGSpace space(const MeshView& mesh) const { return DGSpace(mesh, basis_); }

  /// L2 projection of the initial datum.
  DGField initial(const MeshView& mesh) const;

  DGField step(const DGField& u_old, const MeshView& new_mesh, double t0, double tau,
               SolverStats* stats = nullptr);

 private:
  struct Cache {
    std::uint64_t mesh_id = 0;
    std::optional<double> operator_time;
    double system_tau = 0.0;
    std::optional<double> system_time;
    SparseMatrixCSR mass;
    SparseMatrixCSR spatial;
    SparseMatrixCSR system;
    std::shared_ptr<BlockPreconditioner> prec;
    bool has_mass = false;
    bool has_system = false;
  };

  ProblemDefinition problem_;
  std::shared_ptr<const TensorBasis> basis_;
  StepperConfig config_;
  Cache cache_;
};

/// u_h(t) = l_j(t) u_old + l_{j+1}(t) u_new with l_j(t) = (t1 - t)/tau.
class SlabInterpolant {
 public:
  explicit SlabInterpolant(const TimeSlab& slab) : slab_(&slab) {}

  double weight_old(double t) const;
  double weight_new(double t) const { return 1.0 - weight_old(t); }
  double value(Vec2 p, double t) const;

 private:
  const TimeSlab* slab_;
};

}  // namespace dgcd
