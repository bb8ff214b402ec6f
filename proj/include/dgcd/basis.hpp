#pragma once

// Tensor-product nodal bases on the reference square [-1,1]^2, Gauss-Legendre
// rules, and the affine maps between reference and physical cells.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dgcd/common.hpp"

namespace dgcd {

/// One-dimensional rule on [-1, 1].
struct Rule1D {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with q points (exact to degree 2q-1).
Rule1D gauss_legendre(int q);

/// Gauss-Lobatto-Legendre points (n >= 2), ascending, endpoints included.
std::vector<double> gauss_lobatto_points(int n);

/// Tensor Gauss rule on the reference square plus the matching edge rule.
struct QuadratureRule {
  int order = 0;  // points per direction
  std::vector<Vec2> points;
  std::vector<double> weights;
  Rule1D edge;
};

/// q in [1, 30]; throws otherwise.
QuadratureRule gauss_rule(int q);

/// Values, reference gradients and reference Hessians, each n_loc x n_points.
struct BasisTables {
  Eigen::MatrixXd value;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
  Eigen::MatrixXd dxx;
  Eigen::MatrixXd dxy;
  Eigen::MatrixXd dyy;
};

/// Lagrange basis of Q^p on the Gauss-Lobatto-Legendre tensor grid. Local
/// function (i, j) has index i + (p+1) * j, i counting along x.
class TensorBasis {
 public:
  explicit TensorBasis(int degree);

  int degree() const { return degree_; }
  int n1d() const { return degree_ + 1; }
  int size() const { return n1d() * n1d(); }
  const std::vector<double>& nodes() const { return nodes_; }

  /// 1D Lagrange values and first/second derivatives at xi (each length p+1).
  void eval_1d(double xi, double* value, double* d1, double* d2) const;

  /// Tables of shape n_loc x points.size().
  BasisTables eval(std::span<const Vec2> ref_points) const;

 private:
  int degree_;
  std::vector<double> nodes_;
  std::vector<double> bary_;
  Eigen::MatrixXd diff_;   // diff_(k, i) = L_i'(x_k)
  Eigen::MatrixXd diff2_;  // diff2_(k, i) = L_i''(x_k)
};

/// Affine map from [-1,1]^2 onto an axis-aligned cell.
struct AffineMap {
  Rect cell;

  Vec2 to_physical(Vec2 ref) const {
    return {cell.x0 + 0.5 * (ref.x + 1.0) * cell.width(), cell.y0 + 0.5 * (ref.y + 1.0) * cell.height()};
  }
  Vec2 to_reference(Vec2 p) const {
    return {2.0 * (p.x - cell.x0) / cell.width() - 1.0, 2.0 * (p.y - cell.y0) / cell.height() - 1.0};
  }
  double jacobian_det() const { return 0.25 * cell.width() * cell.height(); }
  /// Diagonal of the reference-to-physical gradient transform.
  Vec2 gradient_scale() const { return {2.0 / cell.width(), 2.0 / cell.height()}; }
};

}  // namespace dgcd
