#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dgcd/dg_operator.hpp"
#include "dgcd/forest.hpp"
#include "dgcd/problems.hpp"

namespace testing {

using namespace dgcd;

inline Rect unit_square() { return {0.0, 1.0, 0.0, 1.0}; }

inline ScalarFn constant(double c) {
  return [c](double, double, double) { return c; };
}

inline VectorFn constant_wind(Vec2 a) {
  return [a](double, double, double) { return a; };
}

/// Problem with the given coefficients and no exact solution.
inline ProblemDefinition custom_problem(double eps, VectorFn wind, ScalarFn div, ScalarFn reaction, ScalarFn forcing,
                                        InitialFn initial = {}, Rect domain = unit_square(), double T = 1.0,
                                        double beta = 0.0) {
  ProblemDefinition p;
  p.name = "custom";
  p.domain = domain;
  p.final_time = T;
  p.epsilon = eps;
  p.wind = std::move(wind);
  p.wind_divergence = std::move(div);
  p.reaction = std::move(reaction);
  p.forcing = std::move(forcing);
  p.initial = initial ? std::move(initial) : InitialFn([](double, double) { return 0.0; });
  p.beta = beta;
  return p;
}

/// Mesh after `rounds` of refining a random quarter of the leaves and
/// coarsening a random third.
inline MeshView random_mesh(std::mt19937& rng, const Rect& domain, int nx, int ny, int rounds) {
  MeshView mesh = MeshView::uniform(domain, nx, ny);
  for (int r = 0; r < rounds; ++r) {
    std::vector<NodeId> leaves(mesh.cells().begin(), mesh.cells().end());
    std::shuffle(leaves.begin(), leaves.end(), rng);
    const std::size_t nref = std::max<std::size_t>(1, leaves.size() / 4);
    std::vector<NodeId> marked(leaves.begin(), leaves.begin() + static_cast<std::ptrdiff_t>(nref));
    mesh = refine_cells(mesh, marked);
    if (r % 2 == 1) {
      std::vector<NodeId> now(mesh.cells().begin(), mesh.cells().end());
      std::shuffle(now.begin(), now.end(), rng);
      now.resize(now.size() / 3);
      mesh = coarsen_cells(mesh, now);
    }
  }
  return mesh;
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = u(rng);
  return v;
}

inline double sum_leaf_areas(const MeshView& mesh) {
  double a = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) a += mesh.cell_rect(k).area();
  return a;
}

inline std::vector<NodeId> sorted_leaves(const MeshView& mesh) {
  std::vector<NodeId> v(mesh.cells().begin(), mesh.cells().end());
  std::sort(v.begin(), v.end());
  return v;
}

/// Gauss points and weights of a rectangle, computed from the 1D rule.
struct Samples {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

inline Samples rect_samples(const Rect& r, int q) {
  const Rule1D g = gauss_legendre(q);
  Samples s;
  for (std::size_t j = 0; j < g.points.size(); ++j)
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      s.points.push_back({r.x0 + 0.5 * (g.points[i] + 1.0) * r.width(), r.y0 + 0.5 * (g.points[j] + 1.0) * r.height()});
      s.weights.push_back(0.25 * r.area() * g.weights[i] * g.weights[j]);
    }
  return s;
}

inline Samples segment_samples(Vec2 a, Vec2 b, int q) {
  const Rule1D g = gauss_legendre(q);
  const double len = norm(b - a);
  Samples s;
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    const double l = 0.5 * (g.points[i] + 1.0);
    s.points.push_back(a + l * (b - a));
    s.weights.push_back(0.5 * len * g.weights[i]);
  }
  return s;
}

/// Value and physical gradient of local basis function i of `cell` at p.
struct Shape {
  double v;
  Vec2 g;
};

inline std::vector<Shape> shapes_at(const TensorBasis& basis, const Rect& cell, Vec2 p) {
  const AffineMap map{cell};
  const Vec2 ref = map.to_reference(p);
  const BasisTables t = basis.eval(std::vector<Vec2>{ref});
  const Vec2 s = map.gradient_scale();
  std::vector<Shape> out(static_cast<std::size_t>(basis.size()));
  for (int i = 0; i < basis.size(); ++i) out[static_cast<std::size_t>(i)] = {t.value(i, 0), {s.x * t.dx(i, 0), s.y * t.dy(i, 0)}};
  return out;
}

/// Dense matrix of B(t; phi_j, phi_i) + K_h(phi_j, phi_i), built pointwise from
/// the bilinear form with the upwind side chosen per quadrature point.
inline Eigen::MatrixXd oracle_operator(const DGSpace& space, const ProblemDefinition& pb, double t, double gamma,
                                       int q) {
  const MeshView& mesh = space.mesh();
  const TensorBasis& basis = space.basis();
  const int n = basis.size();
  const auto N = static_cast<Eigen::Index>(space.num_dofs());
  const double eps = pb.epsilon;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  const auto add = [&](std::size_t ci, int i, std::size_t cj, int j, double v) {
    A(static_cast<Eigen::Index>(ci) * n + i, static_cast<Eigen::Index>(cj) * n + j) += v;
  };
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Rect r = mesh.cell_rect(k);
    const Samples s = rect_samples(r, q);
    for (std::size_t g = 0; g < s.points.size(); ++g) {
      const Vec2 p = s.points[g];
      const auto sh = shapes_at(basis, r, p);
      const Vec2 a = pb.wind(p.x, p.y, t);
      const double c = pb.reaction(p.x, p.y, t) - pb.wind_divergence(p.x, p.y, t);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Shape v = sh[static_cast<std::size_t>(i)], w = sh[static_cast<std::size_t>(j)];
          const double val = eps * dot(w.g, v.g) - w.v * dot(a, v.g) + c * w.v * v.v;
          add(k, i, k, j, s.weights[g] * val);
        }
    }
  }
  for (const auto& e : mesh.edges()) {
    const Samples s = segment_samples(e.a, e.b, q);
    const double sigma = eps * gamma / e.length;
    const Vec2 nL = e.normal;
    for (std::size_t g = 0; g < s.points.size(); ++g) {
      const Vec2 p = s.points[g];
      const double wq = s.weights[g];
      const double an = dot(pb.wind(p.x, p.y, t), nL);
      const auto sl = shapes_at(basis, mesh.cell_rect(e.left), p);
      if (e.boundary()) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const Shape v = sl[static_cast<std::size_t>(i)], w = sl[static_cast<std::size_t>(j)];
            double val = sigma * w.v * v.v - eps * dot(w.g, nL) * v.v - eps * dot(v.g, nL) * w.v;
            if (an > 0.0) val += an * w.v * v.v;
            add(e.left, i, e.left, j, wq * val);
          }
        continue;
      }
      const std::size_t R = *e.right;
      const auto sr = shapes_at(basis, mesh.cell_rect(R), p);
      // Traces of a basis function living on side s (0 = left, 1 = right).
      const auto trace = [&](int side, int i) {
        const Shape sh = side == 0 ? sl[static_cast<std::size_t>(i)] : sr[static_cast<std::size_t>(i)];
        const double vl = side == 0 ? sh.v : 0.0, vr = side == 1 ? sh.v : 0.0;
        const double avg_gn = 0.5 * dot(sh.g, nL);
        return std::array<double, 3>{vl, vr, avg_gn};
      };
      const std::size_t cells[2] = {e.left, R};
      for (int si = 0; si < 2; ++si)
        for (int sj = 0; sj < 2; ++sj)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              const auto v = trace(si, i), w = trace(sj, j);
              const double jv = v[0] - v[1], jw = w[0] - w[1];
              double val = sigma * jw * jv - eps * w[2] * jv - eps * v[2] * jw;
              val += an > 0.0 ? an * w[0] * jv : an * w[1] * jv;
              add(cells[si], i, cells[sj], j, wq * val);
            }
    }
  }
  return A;
}

/// ||g - u||_{L2} with q points per direction.
inline double l2_error(const DGField& u, const InitialFn& g, int q) {
  double acc = 0.0;
  const MeshView& mesh = u.space.mesh();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Samples s = rect_samples(mesh.cell_rect(k), q);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const double d = g(s.points[i].x, s.points[i].y) - u.value(s.points[i]);
      acc += s.weights[i] * d * d;
    }
  }
  return std::sqrt(acc);
}

}  // namespace testing
