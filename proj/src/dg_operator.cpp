#include "dgcd/dg_operator.hpp"

#include <algorithm>

#include "dgcd/local_tables.hpp"

namespace dgcd {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

Mat normal_derivatives(const ShapeTables& s, Vec2 n) { return n.x * s.dx + n.y * s.dy; }

}  // namespace

double DGField::value(Vec2 p) const {
  const auto cell = space.mesh().locate(p);
  if (!cell) throw Error("DGField::value: point outside the domain");
  const AffineMap map{space.mesh().cell_rect(*cell)};
  const Vec2 ref = map.to_reference(p);
  const BasisTables t = space.basis().eval(std::span<const Vec2>(&ref, 1));
  return t.value.col(0).dot(block(*cell));
}

double DGField::cell_mean(std::size_t cell) const {
  const Rect r = space.mesh().cell_rect(cell);
  const Rule1D rule = gauss_legendre(space.degree() + 1);
  const ShapeTables s = cell_shapes(space.basis(), rule, r, r);
  const PointSet ps = cell_points(rule, r);
  return ps.weights.dot(s.value * block(cell)) / r.area();
}

SparseMatrixCSR operator_pattern(const DGSpace& space) {
  const MeshView& mesh = space.mesh();
  std::vector<std::vector<std::size_t>> nbrs(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) nbrs[k].push_back(k);
  for (const auto& e : mesh.edges()) {
    if (e.boundary()) continue;
    nbrs[e.left].push_back(*e.right);
    nbrs[*e.right].push_back(e.left);
  }
  for (auto& v : nbrs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return SparseMatrixCSR::block_pattern(nbrs, space.layout().block);
}

SparseMatrixCSR assemble_mass(const DGSpace& space, int q) {
  const MeshView& mesh = space.mesh();
  std::vector<std::vector<std::size_t>> diag(mesh.num_cells());
  for (std::size_t k = 0; k < diag.size(); ++k) diag[k] = {k};
  auto m = SparseMatrixCSR::block_pattern(diag, space.layout().block);
  const Rule1D rule = gauss_legendre(q);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Rect r = mesh.cell_rect(k);
    const ShapeTables s = cell_shapes(space.basis(), rule, r, r);
    const PointSet ps = cell_points(rule, r);
    m.add_block(k, k, s.value.transpose() * ps.weights.asDiagonal() * s.value);
  }
  return m;
}

SparseMatrixCSR assemble_spatial_operator(const DGSpace& space, const ProblemDefinition& problem, double t,
                                          double gamma, int q, unsigned terms) {
  if (!(gamma > 1.0)) throw std::invalid_argument("assemble_spatial_operator: gamma must exceed 1");
  const MeshView& mesh = space.mesh();
  const double eps = problem.epsilon;
  const Rule1D rule = gauss_legendre(q);
  auto A = operator_pattern(space);
  const Eigen::Index n = static_cast<Eigen::Index>(space.layout().block);

  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Rect r = mesh.cell_rect(k);
    const ShapeTables s = cell_shapes(space.basis(), rule, r, r);
    const PointSet ps = cell_points(rule, r);
    const Eigen::Index m = ps.weights.size();
    Vec ax(m), ay(m), c(m), b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Vec2 p = ps.points[static_cast<std::size_t>(i)];
      const Vec2 a = problem.wind(p.x, p.y, t);
      ax(i) = ps.weights(i) * a.x;
      ay(i) = ps.weights(i) * a.y;
      c(i) = ps.weights(i) * problem.wind_divergence(p.x, p.y, t);
      b(i) = ps.weights(i) * problem.reaction(p.x, p.y, t);
    }
    Mat blk = Mat::Zero(n, n);
    if (terms & kDiffusionTerm)
      blk += eps * (s.dx.transpose() * ps.weights.asDiagonal() * s.dx +
                    s.dy.transpose() * ps.weights.asDiagonal() * s.dy);
    if (terms & kConvectionTerm)
      blk -= s.dx.transpose() * ax.asDiagonal() * s.value + s.dy.transpose() * ay.asDiagonal() * s.value +
             s.value.transpose() * c.asDiagonal() * s.value;
    if (terms & kReactionTerm) blk += s.value.transpose() * b.asDiagonal() * s.value;
    A.add_block(k, k, blk);
  }

  for (const auto& e : mesh.edges()) {
    const PointSet ps = edge_points(rule, e);
    const Eigen::Index m = ps.weights.size();
    const double sigma = eps * gamma / e.length;
    Vec an(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Vec2 p = ps.points[static_cast<std::size_t>(i)];
      an(i) = dot(problem.wind(p.x, p.y, t), e.normal);
    }
    const ShapeTables sl = edge_shapes(space.basis(), rule, e, mesh.cell_rect(e.left));
    const Mat nl = normal_derivatives(sl, e.normal);
    const auto& W = ps.weights;

    if (e.boundary()) {
      Mat blk = Mat::Zero(n, n);
      const Mat VtW = sl.value.transpose() * W.asDiagonal();
      if (terms & kPenaltyTerm) blk += sigma * VtW * sl.value;
      if (terms & kConsistencyTerm) {
        const Mat c = VtW * nl;
        blk -= eps * (c + c.transpose());
      }
      if (terms & kConvectionTerm) {
        Vec wout = (W.array() * an.array().max(0.0)).matrix();
        blk += sl.value.transpose() * wout.asDiagonal() * sl.value;
      }
      A.add_block(e.left, e.left, blk);
      continue;
    }

    const ShapeTables sr = edge_shapes(space.basis(), rule, e, mesh.cell_rect(*e.right));
    const Mat nr = normal_derivatives(sr, e.normal);
    const std::size_t cells[2] = {e.left, *e.right};
    const Mat* V[2] = {&sl.value, &sr.value};
    const Mat* N[2] = {&nl, &nr};
    const double sgn[2] = {1.0, -1.0};
    Vec wl(m), wr(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      wl(i) = an(i) >= 0.0 ? W(i) * an(i) : 0.0;
      wr(i) = an(i) < 0.0 ? W(i) * an(i) : 0.0;
    }
    const Vec* wup[2] = {&wl, &wr};
    for (int si = 0; si < 2; ++si)
      for (int ri = 0; ri < 2; ++ri) {
        Mat blk = Mat::Zero(n, n);
        const Mat VtW = V[si]->transpose() * W.asDiagonal();
        if (terms & kPenaltyTerm) blk += sigma * sgn[si] * sgn[ri] * VtW * *V[ri];
        if (terms & kConsistencyTerm)
          blk -= 0.5 * eps * (sgn[si] * VtW * *N[ri] + sgn[ri] * N[si]->transpose() * W.asDiagonal() * *V[ri]);
        if (terms & kConvectionTerm) blk += sgn[si] * V[si]->transpose() * wup[ri]->asDiagonal() * *V[ri];
        A.add_block(cells[si], cells[ri], blk);
      }
  }
  return A;
}

Vec assemble_load(const DGSpace& space, const ProblemDefinition& problem, double t, int q) {
  const MeshView& mesh = space.mesh();
  const Rule1D rule = gauss_legendre(q);
  const Eigen::Index n = static_cast<Eigen::Index>(space.layout().block);
  Vec F = Vec::Zero(static_cast<Eigen::Index>(space.num_dofs()));
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Rect r = mesh.cell_rect(k);
    const ShapeTables s = cell_shapes(space.basis(), rule, r, r);
    const PointSet ps = cell_points(rule, r);
    Vec wf(ps.weights.size());
    for (Eigen::Index i = 0; i < wf.size(); ++i) {
      const Vec2 p = ps.points[static_cast<std::size_t>(i)];
      wf(i) = ps.weights(i) * problem.forcing(p.x, p.y, t);
    }
    F.segment(static_cast<Eigen::Index>(k) * n, n) = s.value.transpose() * wf;
  }
  return F;
}

Vec l2_project(const DGSpace& space, const InitialFn& g, int q) {
  const MeshView& mesh = space.mesh();
  const Rule1D rule = gauss_legendre(q);
  const Eigen::Index n = static_cast<Eigen::Index>(space.layout().block);
  Vec u = Vec::Zero(static_cast<Eigen::Index>(space.num_dofs()));
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Rect r = mesh.cell_rect(k);
    const ShapeTables s = cell_shapes(space.basis(), rule, r, r);
    const PointSet ps = cell_points(rule, r);
    Vec wg(ps.weights.size());
    for (Eigen::Index i = 0; i < wg.size(); ++i) {
      const Vec2 p = ps.points[static_cast<std::size_t>(i)];
      wg(i) = ps.weights(i) * g(p.x, p.y);
    }
    const Mat M = s.value.transpose() * ps.weights.asDiagonal() * s.value;
    u.segment(static_cast<Eigen::Index>(k) * n, n) = M.llt().solve(s.value.transpose() * wg);
  }
  return u;
}

AssembledSystem assemble_system(const DGSpace& space, const ProblemDefinition& problem, double t, double gamma,
                                const QuadratureOrders& quad) {
  const int p = space.degree();
  AssembledSystem s;
  s.mass = assemble_mass(space, quad.assembly_points(p));
  s.spatial = assemble_spatial_operator(space, problem, t, gamma, quad.assembly_points(p));
  s.load = assemble_load(space, problem, t, quad.estimator_points(p));
  s.time = t;
  s.gamma = gamma;
  return s;
}

}  // namespace dgcd
