#include "dgcd/local_tables.hpp"

namespace dgcd {

namespace {

// 1D values and scaled derivatives at the given physical coordinates of an
// interval [lo, hi]; rows are points, columns are 1D basis functions.
struct Table1D {
  Eigen::MatrixXd v;
  Eigen::MatrixXd d1;
  Eigen::MatrixXd d2;
};

Table1D table_1d(const TensorBasis& basis, const std::vector<double>& coords, double lo, double hi) {
  const int n = basis.n1d();
  const auto m = static_cast<Eigen::Index>(coords.size());
  Table1D t{Eigen::MatrixXd(m, n), Eigen::MatrixXd(m, n), Eigen::MatrixXd(m, n)};
  const double scale = 2.0 / (hi - lo);
  std::vector<double> buf(static_cast<std::size_t>(3 * n));
  for (Eigen::Index q = 0; q < m; ++q) {
    const double xi = scale * (coords[static_cast<std::size_t>(q)] - lo) - 1.0;
    basis.eval_1d(xi, buf.data(), buf.data() + n, buf.data() + 2 * n);
    for (int i = 0; i < n; ++i) {
      t.v(q, i) = buf[static_cast<std::size_t>(i)];
      t.d1(q, i) = scale * buf[static_cast<std::size_t>(n + i)];
      t.d2(q, i) = scale * scale * buf[static_cast<std::size_t>(2 * n + i)];
    }
  }
  return t;
}

std::vector<double> map_rule(const Rule1D& rule, double lo, double hi) {
  std::vector<double> out(rule.points.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lo + 0.5 * (rule.points[i] + 1.0) * (hi - lo);
  return out;
}

// Combines 1D tables into 2D ones; point index = qx + mx * qy.
ShapeTables combine(const Table1D& tx, const Table1D& ty, int n, bool with_laplacian) {
  const Eigen::Index mx = tx.v.rows();
  const Eigen::Index my = ty.v.rows();
  const Eigen::Index np = mx * my;
  ShapeTables s;
  s.value.resize(np, n * n);
  s.dx.resize(np, n * n);
  s.dy.resize(np, n * n);
  if (with_laplacian) s.laplacian.resize(np, n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Eigen::Index k = i + n * j;
      for (Eigen::Index qy = 0; qy < my; ++qy)
        for (Eigen::Index qx = 0; qx < mx; ++qx) {
          const Eigen::Index q = qx + mx * qy;
          s.value(q, k) = tx.v(qx, i) * ty.v(qy, j);
          s.dx(q, k) = tx.d1(qx, i) * ty.v(qy, j);
          s.dy(q, k) = tx.v(qx, i) * ty.d1(qy, j);
          if (with_laplacian) s.laplacian(q, k) = tx.d2(qx, i) * ty.v(qy, j) + tx.v(qx, i) * ty.d2(qy, j);
        }
    }
  return s;
}

}  // namespace

PointSet cell_points(const Rule1D& rule, const Rect& region) {
  const auto xs = map_rule(rule, region.x0, region.x1);
  const auto ys = map_rule(rule, region.y0, region.y1);
  const double jac = 0.25 * region.area();
  PointSet ps;
  const auto m = xs.size();
  ps.points.reserve(m * m);
  ps.weights.resize(static_cast<Eigen::Index>(m * m));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      ps.points.push_back({xs[i], ys[j]});
      ps.weights(static_cast<Eigen::Index>(i + m * j)) = jac * rule.weights[i] * rule.weights[j];
    }
  return ps;
}

ShapeTables cell_shapes(const TensorBasis& basis, const Rule1D& rule, const Rect& region, const Rect& owner,
                        bool with_laplacian) {
  const Table1D tx = table_1d(basis, map_rule(rule, region.x0, region.x1), owner.x0, owner.x1);
  const Table1D ty = table_1d(basis, map_rule(rule, region.y0, region.y1), owner.y0, owner.y1);
  return combine(tx, ty, basis.n1d(), with_laplacian);
}

PointSet edge_points(const Rule1D& rule, const EdgeSegment& edge) {
  PointSet ps;
  const auto m = rule.points.size();
  ps.points.reserve(m);
  ps.weights.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double s = 0.5 * (rule.points[i] + 1.0);
    ps.points.push_back(edge.a + s * (edge.b - edge.a));
    ps.weights(static_cast<Eigen::Index>(i)) = 0.5 * edge.length * rule.weights[i];
  }
  return ps;
}

ShapeTables edge_shapes(const TensorBasis& basis, const Rule1D& rule, const EdgeSegment& edge, const Rect& owner) {
  if (edge.orientation == EdgeOrientation::Vertical) {
    const Table1D tx = table_1d(basis, {edge.a.x}, owner.x0, owner.x1);
    const Table1D ty = table_1d(basis, map_rule(rule, edge.a.y, edge.b.y), owner.y0, owner.y1);
    return combine(tx, ty, basis.n1d(), false);
  }
  const Table1D tx = table_1d(basis, map_rule(rule, edge.a.x, edge.b.x), owner.x0, owner.x1);
  const Table1D ty = table_1d(basis, {edge.a.y}, owner.y0, owner.y1);
  return combine(tx, ty, basis.n1d(), false);
}

}  // namespace dgcd
