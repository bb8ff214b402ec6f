#pragma once

// Physical-space shape tables on cells, sub-cells and edge segments. A table
// row is a quadrature point, a column a local basis function of the owning
// cell. The integration region may be a strict sub-rectangle of the owner,
// which is how cross-mesh integrals on overlay cells stay exact.

#include <vector>

#include <Eigen/Dense>

#include "dgcd/basis.hpp"
#include "dgcd/forest.hpp"

namespace dgcd {

struct PointSet {
  std::vector<Vec2> points;
  Eigen::VectorXd weights;  // physical weights
};

struct ShapeTables {
  Eigen::MatrixXd value;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
  Eigen::MatrixXd laplacian;  // filled only on request
};

/// Tensor Gauss points on a rectangle.
PointSet cell_points(const Rule1D& rule, const Rect& region);

/// Shape tables of `owner`'s basis at the Gauss points of `region`.
ShapeTables cell_shapes(const TensorBasis& basis, const Rule1D& rule, const Rect& region, const Rect& owner,
                        bool with_laplacian = false);

/// Gauss points along a segment.
PointSet edge_points(const Rule1D& rule, const EdgeSegment& edge);

/// Traces of `owner`'s basis (values and physical gradients) along a segment.
ShapeTables edge_shapes(const TensorBasis& basis, const Rule1D& rule, const EdgeSegment& edge, const Rect& owner);

}  // namespace dgcd
