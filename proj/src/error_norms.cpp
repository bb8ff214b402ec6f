#include "dgcd/error_norms.hpp"

#include <cstdio>

#include "dgcd/local_tables.hpp"

namespace dgcd {

double energy_norm_sq(const DGField& v, double epsilon, double beta, double gamma, int q) {
  const MeshView& mesh = v.space.mesh();
  const Rule1D rule = gauss_legendre(q);
  double total = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Rect r = mesh.cell_rect(k);
    const PointSet ps = cell_points(rule, r);
    const ShapeTables s = cell_shapes(v.space.basis(), rule, r, r);
    const auto c = v.block(k);
    total += epsilon * (ps.weights.dot((s.dx * c).cwiseAbs2()) + ps.weights.dot((s.dy * c).cwiseAbs2()));
    if (beta > 0.0) total += beta * ps.weights.dot((s.value * c).cwiseAbs2());
  }
  for (const auto& e : mesh.edges()) {
    const PointSet ps = edge_points(rule, e);
    Eigen::VectorXd jump = edge_shapes(v.space.basis(), rule, e, mesh.cell_rect(e.left)).value * v.block(e.left);
    if (!e.boundary())
      jump -= edge_shapes(v.space.basis(), rule, e, mesh.cell_rect(*e.right)).value * v.block(*e.right);
    total += epsilon * gamma / e.length * ps.weights.dot(jump.cwiseAbs2());
  }
  return total;
}

double energy_error_sq(const DGField& v, const ExactSolution& exact, double t, double epsilon, double beta,
                       double gamma, int q) {
  const MeshView& mesh = v.space.mesh();
  const Rule1D rule = gauss_legendre(q);
  double total = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Rect r = mesh.cell_rect(k);
    const PointSet ps = cell_points(rule, r);
    const ShapeTables s = cell_shapes(v.space.basis(), rule, r, r);
    const auto c = v.block(k);
    const Eigen::VectorXd val = s.value * c, gx = s.dx * c, gy = s.dy * c;
    for (Eigen::Index i = 0; i < val.size(); ++i) {
      const Vec2 p = ps.points[static_cast<std::size_t>(i)];
      const Vec2 gu = exact.gradient(p.x, p.y, t);
      const double ex = gu.x - gx(i);
      const double ey = gu.y - gy(i);
      double term = epsilon * (ex * ex + ey * ey);
      if (beta > 0.0) {
        const double ev = exact.value(p.x, p.y, t) - val(i);
        term += beta * ev * ev;
      }
      total += ps.weights(i) * term;
    }
  }
  for (const auto& e : mesh.edges()) {
    const PointSet ps = edge_points(rule, e);
    Eigen::VectorXd jump = edge_shapes(v.space.basis(), rule, e, mesh.cell_rect(e.left)).value * v.block(e.left);
    if (!e.boundary())
      jump -= edge_shapes(v.space.basis(), rule, e, mesh.cell_rect(*e.right)).value * v.block(*e.right);
    total += epsilon * gamma / e.length * ps.weights.dot(jump.cwiseAbs2());
  }
  return total;
}

double energy_error_sq_interval(const TimeSlab& slab, const ExactSolution& exact, double epsilon, double beta,
                                double gamma, int q, int time_points) {
  const Overlay& ov = slab.overlay;
  const Rule1D rule = gauss_legendre(q);
  const TimeRule tr = time_rule(slab.t0, slab.t1, time_points);
  const std::size_t nt = tr.times.size();
  std::vector<double> lw(nt);
  for (std::size_t g = 0; g < nt; ++g) lw[g] = (slab.t1 - tr.times[g]) / slab.tau();
  const auto& ma = slab.u_old.space.mesh();
  const auto& mb = slab.u_new.space.mesh();
  const auto& basis_a = slab.u_old.space.basis();
  const auto& basis_b = slab.u_new.space.basis();
  std::vector<double> at(nt, 0.0);

  for (std::size_t k = 0; k < ov.mesh.num_cells(); ++k) {
    const Rect region = ov.mesh.cell_rect(k);
    const PointSet ps = cell_points(rule, region);
    const std::size_t ka = ov.cell_in_a[k];
    const std::size_t kb = ov.cell_in_b[k];
    const ShapeTables sa = cell_shapes(basis_a, rule, region, ma.cell_rect(ka));
    const ShapeTables sb = cell_shapes(basis_b, rule, region, mb.cell_rect(kb));
    const auto ca = slab.u_old.block(ka);
    const auto cb = slab.u_new.block(kb);
    const Eigen::VectorXd v0 = sa.value * ca, x0 = sa.dx * ca, y0 = sa.dy * ca;
    const Eigen::VectorXd v1 = sb.value * cb, x1 = sb.dx * cb, y1 = sb.dy * cb;
    for (std::size_t g = 0; g < nt; ++g) {
      const double t = tr.times[g];
      const double l = lw[g];
      double acc = 0.0;
      for (Eigen::Index i = 0; i < ps.weights.size(); ++i) {
        const Vec2 p = ps.points[static_cast<std::size_t>(i)];
        const Vec2 gu = exact.gradient(p.x, p.y, t);
        const double ex = gu.x - (l * x0(i) + (1.0 - l) * x1(i));
        const double ey = gu.y - (l * y0(i) + (1.0 - l) * y1(i));
        double term = epsilon * (ex * ex + ey * ey);
        if (beta > 0.0) {
          const double ev = exact.value(p.x, p.y, t) - (l * v0(i) + (1.0 - l) * v1(i));
          term += beta * ev * ev;
        }
        acc += ps.weights(i) * term;
      }
      at[g] += acc;
    }
  }

  const auto trace = [&](const EdgeSegment& e, std::size_t cell, double l) {
    const std::size_t ka = ov.cell_in_a[cell];
    const std::size_t kb = ov.cell_in_b[cell];
    const Eigen::VectorXd v0 = edge_shapes(basis_a, rule, e, ma.cell_rect(ka)).value * slab.u_old.block(ka);
    const Eigen::VectorXd v1 = edge_shapes(basis_b, rule, e, mb.cell_rect(kb)).value * slab.u_new.block(kb);
    return Eigen::VectorXd(l * v0 + (1.0 - l) * v1);
  };
  for (const auto& e : ov.mesh.edges()) {
    const PointSet ps = edge_points(rule, e);
    const double sigma = epsilon * gamma / e.length;
    for (std::size_t g = 0; g < nt; ++g) {
      Eigen::VectorXd jump = trace(e, e.left, lw[g]);
      if (!e.boundary()) jump -= trace(e, *e.right, lw[g]);
      at[g] += sigma * ps.weights.dot(jump.cwiseAbs2());
    }
  }

  double total = 0.0;
  for (std::size_t g = 0; g < nt; ++g) total += tr.weights[g] * at[g];
  return total;
}

std::string Effectivity::str() const {
  switch (kind) {
    case Kind::Exact:
      return "exact";
    case Kind::Undefined:
      return "undefined";
    case Kind::Value:
      break;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

Effectivity effectivity(double eta_sq, double error_sq) {
  if (error_sq > 0.0) return {Effectivity::Kind::Value, std::sqrt(eta_sq) / std::sqrt(error_sq)};
  if (eta_sq == 0.0) return {Effectivity::Kind::Exact, 0.0};
  return {Effectivity::Kind::Undefined, 0.0};
}

}  // namespace dgcd
