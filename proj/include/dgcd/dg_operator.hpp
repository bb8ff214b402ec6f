#pragma once

// Discrete space, DoF layout and assembly of the interior-penalty dG operator
// B(t; w, v) + K_h(w, v), the mass matrix and load vectors.

#include <memory>

#include <Eigen/Dense>

#include "dgcd/basis.hpp"
#include "dgcd/forest.hpp"
#include "dgcd/problems.hpp"
#include "dgcd/sparse.hpp"

namespace dgcd {

/// Points per direction for the three quadrature uses. Zero selects the
/// default p+2 (assembly), p+3 (estimators, data), p+4 (exact-error norms).
struct QuadratureOrders {
  int assembly = 0;
  int estimator = 0;
  int error = 0;

  int assembly_points(int p) const { return assembly > 0 ? assembly : p + 2; }
  int estimator_points(int p) const { return estimator > 0 ? estimator : p + 3; }
  int error_points(int p) const { return error > 0 ? error : p + 4; }
};

/// Cell k owns the contiguous DoF block [k*block, (k+1)*block).
struct DofLayout {
  std::size_t num_cells = 0;
  std::size_t block = 0;

  std::size_t size() const { return num_cells * block; }
  std::size_t offset(std::size_t cell) const { return cell * block; }
};

class DGSpace {
 public:
  DGSpace(MeshView mesh, std::shared_ptr<const TensorBasis> basis)
      : mesh_(std::move(mesh)), basis_(std::move(basis)) {}

  const MeshView& mesh() const { return mesh_; }
  const TensorBasis& basis() const { return *basis_; }
  const std::shared_ptr<const TensorBasis>& basis_ptr() const { return basis_; }
  int degree() const { return basis_->degree(); }
  DofLayout layout() const { return {mesh_.num_cells(), static_cast<std::size_t>(basis_->size())}; }
  std::size_t num_dofs() const { return layout().size(); }

 private:
  MeshView mesh_;
  std::shared_ptr<const TensorBasis> basis_;
};

/// Coefficient vector over a space.
struct DGField {
  DGSpace space;
  Eigen::VectorXd coeffs;

  auto block(std::size_t cell) const {
    const auto n = static_cast<Eigen::Index>(space.layout().block);
    return coeffs.segment(static_cast<Eigen::Index>(cell) * n, n);
  }
  double value(Vec2 p) const;
  double cell_mean(std::size_t cell) const;
};

/// Selects parts of the spatial operator (tests assemble pieces separately).
enum OperatorTerms : unsigned {
  kDiffusionTerm = 1u,
  kConvectionTerm = 2u,   // -a w . grad v - div(a) w v plus upwind face terms
  kReactionTerm = 4u,     // b w v
  kPenaltyTerm = 8u,      // eps*gamma/h_E [w].[v]
  kConsistencyTerm = 16u, // K_h
  kAllTerms = 31u,
};

SparseMatrixCSR assemble_mass(const DGSpace& space, int q);

SparseMatrixCSR assemble_spatial_operator(const DGSpace& space, const ProblemDefinition& problem, double t,
                                          double gamma, int q, unsigned terms = kAllTerms);

Eigen::VectorXd assemble_load(const DGSpace& space, const ProblemDefinition& problem, double t, int q);

/// Orthogonal L2 projection, solved cell by cell.
Eigen::VectorXd l2_project(const DGSpace& space, const InitialFn& g, int q);

struct AssembledSystem {
  SparseMatrixCSR mass;
  SparseMatrixCSR spatial;
  Eigen::VectorXd load;
  double time = 0.0;
  double gamma = 0.0;
};

AssembledSystem assemble_system(const DGSpace& space, const ProblemDefinition& problem, double t, double gamma,
                                const QuadratureOrders& quad = {});

/// Empty block pattern (self + face neighbours) for a space.
SparseMatrixCSR operator_pattern(const DGSpace& space);

}  // namespace dgcd
