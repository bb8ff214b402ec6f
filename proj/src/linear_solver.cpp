#include "dgcd/linear_solver.hpp"

#include <algorithm>
#include <cmath>

namespace dgcd {

PreconditionerKind parse_preconditioner(const std::string& name) {
  if (name == "none") return PreconditionerKind::None;
  if (name == "block_jacobi") return PreconditionerKind::BlockJacobi;
  if (name == "block_ilu0") return PreconditionerKind::BlockILU0;
  throw Error("unknown preconditioner '" + name + "'");
}

std::string to_string(PreconditionerKind kind) {
  switch (kind) {
    case PreconditionerKind::None:
      return "none";
    case PreconditionerKind::BlockJacobi:
      return "block_jacobi";
    case PreconditionerKind::BlockILU0:
      return "block_ilu0";
  }
  return "?";
}

BlockPreconditioner::BlockPreconditioner(const SparseMatrixCSR& A, PreconditionerKind kind) : kind_(kind) {
  if (kind_ == PreconditionerKind::None) return;
  block_ = A.block_size();
  const std::size_t b = block_;
  const std::size_t nb = A.rows() / b;
  diag_.reserve(nb);
  if (kind_ == PreconditionerKind::BlockJacobi) {
    for (std::size_t k = 0; k < nb; ++k) diag_.emplace_back(A.block(k, k));
    return;
  }

  rows_.resize(nb);
  std::vector<Eigen::MatrixXd> dinv(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    std::vector<std::size_t> cols;
    const std::size_t r = i * b;
    for (std::size_t k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; k += b)
      cols.push_back(static_cast<std::size_t>(A.col_idx()[k]) / b);
    std::vector<Eigen::MatrixXd> work;
    work.reserve(cols.size());
    for (std::size_t c : cols) work.push_back(A.block(i, c));

    for (std::size_t a = 0; a < cols.size() && cols[a] < i; ++a) {
      const std::size_t k = cols[a];
      work[a] = work[a] * dinv[k];
      const Row& rk = rows_[k];
      for (std::size_t c = a + 1; c < cols.size(); ++c) {
        const auto it = std::lower_bound(rk.upper_cols.begin(), rk.upper_cols.end(), cols[c]);
        if (it == rk.upper_cols.end() || *it != cols[c]) continue;
        work[c] -= work[a] * rk.upper[static_cast<std::size_t>(it - rk.upper_cols.begin())];
      }
    }
    Row& ri = rows_[i];
    for (std::size_t a = 0; a < cols.size(); ++a) {
      if (cols[a] < i) {
        ri.lower_cols.push_back(cols[a]);
        ri.lower.push_back(std::move(work[a]));
      } else if (cols[a] > i) {
        ri.upper_cols.push_back(cols[a]);
        ri.upper.push_back(std::move(work[a]));
      } else {
        diag_.emplace_back(work[a]);
        dinv[i] = diag_.back().inverse();
      }
    }
  }
}

void BlockPreconditioner::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  if (kind_ == PreconditionerKind::None) {
    out = in;
    return;
  }
  const auto n = static_cast<Eigen::Index>(block_);
  const auto seg = [n](Eigen::VectorXd& v, std::size_t k) { return v.segment(static_cast<Eigen::Index>(k) * n, n); };
  out.resize(in.size());
  if (kind_ == PreconditionerKind::BlockJacobi) {
    for (std::size_t k = 0; k < diag_.size(); ++k)
      out.segment(static_cast<Eigen::Index>(k) * n, n) = diag_[k].solve(in.segment(static_cast<Eigen::Index>(k) * n, n));
    return;
  }
  out = in;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& r = rows_[i];
    for (std::size_t a = 0; a < r.lower_cols.size(); ++a) seg(out, i) -= r.lower[a] * seg(out, r.lower_cols[a]);
  }
  Eigen::VectorXd tmp(n);
  for (std::size_t i = rows_.size(); i-- > 0;) {
    const Row& r = rows_[i];
    tmp = seg(out, i);
    for (std::size_t a = 0; a < r.upper_cols.size(); ++a) tmp -= r.upper[a] * seg(out, r.upper_cols[a]);
    seg(out, i) = diag_[i].solve(tmp);
  }
}

SolverStats gmres_solve(const SparseMatrixCSR& A, const Eigen::VectorXd& b_in, Eigen::VectorXd& x,
                        const SolverConfig& config, const BlockPreconditioner* prec) {
  const Eigen::Index n = b_in.size();
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);
  SolverStats stats;
  // Solve for b / max|b| so tiny right-hand sides do not underflow in the norms.
  const double scale = b_in.size() ? b_in.lpNorm<Eigen::Infinity>() : 0.0;
  if (scale == 0.0) {
    x.setZero();
    stats.converged = true;
    return stats;
  }
  const Eigen::VectorXd b = b_in / scale;
  x /= scale;
  const double bnorm = b.norm();
  std::unique_ptr<BlockPreconditioner> own;
  if (!prec) {
    const PreconditionerKind kind = A.block_size() > 1 ? config.preconditioner : PreconditionerKind::None;
    own = std::make_unique<BlockPreconditioner>(A, kind);
    prec = own.get();
  }
  const int m = std::max(1, config.restart);

  Eigen::VectorXd r = b - A * x;
  double rel = r.norm() / bnorm;
  Eigen::VectorXd best = x;
  double best_rel = rel;
  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1), z, w;

  while (rel > config.tolerance && stats.iterations < config.max_iterations) {
    const double beta = r.norm();
    V.col(0) = r / beta;
    g.setZero();
    g(0) = beta;
    H.setZero();
    int k = 0;
    while (k < m && stats.iterations < config.max_iterations) {
      ++stats.iterations;
      prec->apply(V.col(k), z);
      A.multiply(z, w);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V.col(i).dot(w);
        w -= H(i, k) * V.col(i);
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 0.0) V.col(k + 1) = w / H(k + 1, k);
      for (int i = 0; i < k; ++i) {
        const double t = cs(i) * H(i, k) + sn(i) * H(i + 1, k);
        H(i + 1, k) = -sn(i) * H(i, k) + cs(i) * H(i + 1, k);
        H(i, k) = t;
      }
      const double den = std::hypot(H(k, k), H(k + 1, k));
      cs(k) = den == 0.0 ? 1.0 : H(k, k) / den;
      sn(k) = den == 0.0 ? 0.0 : H(k + 1, k) / den;
      H(k, k) = den;
      H(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);
      ++k;
      if (std::abs(g(k)) <= 0.5 * config.tolerance * bnorm || den == 0.0) break;
    }
    const Eigen::VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    prec->apply(V.leftCols(k) * y, z);
    x += z;
    r = b - A * x;
    rel = r.norm() / bnorm;
    if (rel < best_rel) {
      best_rel = rel;
      best = x;
    }
    if (!std::isfinite(rel)) break;
  }
  stats.relative_residual = best_rel;
  stats.converged = best_rel <= config.tolerance;
  if (!stats.converged)
    throw SolverError("GMRES did not converge (relative residual " + std::to_string(best_rel) + ")", best * scale,
                      best_rel);
  x = best * scale;
  return stats;
}

}  // namespace dgcd
