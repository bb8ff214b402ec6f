#pragma once

// Restarted GMRES with right preconditioning by cell blocks.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgcd/common.hpp"
#include "dgcd/sparse.hpp"

namespace dgcd {

enum class PreconditionerKind { None, BlockJacobi, BlockILU0 };

struct SolverConfig {
  double tolerance = 1e-10;  // on ||b - Ax|| / ||b||
  int max_iterations = 5000;
  int restart = 60;
  PreconditionerKind preconditioner = PreconditionerKind::BlockJacobi;
};

struct SolverStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Thrown when the iteration limit is reached; carries the best iterate.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, Eigen::VectorXd best, double residual)
      : Error(what), best_(std::move(best)), residual_(residual) {}
  const Eigen::VectorXd& best_iterate() const { return best_; }
  double relative_residual() const { return residual_; }

 private:
  Eigen::VectorXd best_;
  double residual_;
};

PreconditionerKind parse_preconditioner(const std::string& name);
std::string to_string(PreconditionerKind kind);

/// Approximate inverse built from the cell blocks of a matrix: inverse of the
/// block diagonal, or block ILU(0) on the block sparsity pattern.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const SparseMatrixCSR& A, PreconditionerKind kind);

  PreconditionerKind kind() const { return kind_; }
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;

 private:
  struct Row {
    std::vector<std::size_t> lower_cols;
    std::vector<Eigen::MatrixXd> lower;  // L blocks (unit diagonal implied)
    std::vector<std::size_t> upper_cols;
    std::vector<Eigen::MatrixXd> upper;  // strictly upper U blocks
  };
  PreconditionerKind kind_;
  std::size_t block_ = 1;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> diag_;
  std::vector<Row> rows_;
};

/// Solves A x = b. `x` holds the initial guess on entry (zero if its size does
/// not match). A preconditioner built for A may be passed to skip the setup.
/// Throws SolverError without convergence.
SolverStats gmres_solve(const SparseMatrixCSR& A, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                        const SolverConfig& config = {}, const BlockPreconditioner* prec = nullptr);

}  // namespace dgcd
