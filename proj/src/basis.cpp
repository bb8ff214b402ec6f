#include "dgcd/basis.hpp"

#include <numbers>

namespace dgcd {

Rule1D gauss_legendre(int q) {
  if (q < 1 || q > 30) throw Error("gauss_legendre: order must lie in [1, 30]");
  Rule1D rule;
  rule.points.assign(static_cast<std::size_t>(q), 0.0);
  rule.weights.assign(static_cast<std::size_t>(q), 0.0);
  if (q == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  // Returns P_q(x) and P_q'(x).
  auto legendre = [q](double x, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < q / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[static_cast<std::size_t>(i)] = -x;
    rule.points[static_cast<std::size_t>(q - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(q - 1 - i)] = w;
  }
  if (q % 2 == 1) {
    double dp = 0.0;
    legendre(0.0, dp);
    rule.weights[static_cast<std::size_t>(q / 2)] = 2.0 / (dp * dp);
  }
  return rule;
}

std::vector<double> gauss_lobatto_points(int n) {
  if (n < 2) throw Error("gauss_lobatto_points: need at least two points");
  const int N = n - 1;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double xi = -std::cos(std::numbers::pi * i / N);
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = xi;
      for (int k = 2; k <= N; ++k) {
        const double pk = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (N == 1) p0 = 1.0;
      const double dx = (xi * p1 - p0) / (n * p1);
      xi -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = xi;
  }
  x.front() = -1.0;
  x.back() = 1.0;
  for (int i = 0; i < n / 2; ++i) {  // enforce exact symmetry
    const double s = 0.5 * (x[static_cast<std::size_t>(n - 1 - i)] - x[static_cast<std::size_t>(i)]);
    x[static_cast<std::size_t>(i)] = -s;
    x[static_cast<std::size_t>(n - 1 - i)] = s;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
  return x;
}

QuadratureRule gauss_rule(int q) {
  QuadratureRule rule;
  rule.order = q;
  rule.edge = gauss_legendre(q);
  const auto& p = rule.edge.points;
  const auto& w = rule.edge.weights;
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < q; ++i) {
      rule.points.push_back({p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]});
      rule.weights.push_back(w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)]);
    }
  return rule;
}

TensorBasis::TensorBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 10) throw Error("TensorBasis: degree must lie in [1, 10]");
  const int n = degree + 1;
  nodes_ = gauss_lobatto_points(n);
  bary_.assign(static_cast<std::size_t>(n), 1.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      if (k != i) bary_[static_cast<std::size_t>(i)] /= nodes_[static_cast<std::size_t>(i)] - nodes_[static_cast<std::size_t>(k)];

  diff_.resize(n, n);
  for (int k = 0; k < n; ++k) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const double d = (bary_[static_cast<std::size_t>(i)] / bary_[static_cast<std::size_t>(k)]) /
                       (nodes_[static_cast<std::size_t>(k)] - nodes_[static_cast<std::size_t>(i)]);
      diff_(k, i) = d;
      diag -= d;
    }
    diff_(k, k) = diag;
  }
  diff2_ = diff_ * diff_;
}

void TensorBasis::eval_1d(double xi, double* value, double* d1, double* d2) const {
  const int n = n1d();
  int hit = -1;
  for (int i = 0; i < n; ++i)
    if (xi == nodes_[static_cast<std::size_t>(i)]) hit = i;
  if (hit >= 0) {
    for (int i = 0; i < n; ++i) value[i] = i == hit ? 1.0 : 0.0;
  } else {
    double ell = 1.0;
    for (int i = 0; i < n; ++i) ell *= xi - nodes_[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i) value[i] = ell * bary_[static_cast<std::size_t>(i)] / (xi - nodes_[static_cast<std::size_t>(i)]);
  }
  // Derivatives of degree-p polynomials are reproduced by their nodal interpolants.
  for (int i = 0; i < n; ++i) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (int k = 0; k < n; ++k) {
      s1 += diff_(k, i) * value[k];
      s2 += diff2_(k, i) * value[k];
    }
    if (d1) d1[i] = s1;
    if (d2) d2[i] = s2;
  }
}

BasisTables TensorBasis::eval(std::span<const Vec2> ref_points) const {
  const int n = n1d();
  const auto np = static_cast<Eigen::Index>(ref_points.size());
  BasisTables t;
  t.value.resize(size(), np);
  t.dx.resize(size(), np);
  t.dy.resize(size(), np);
  t.dxx.resize(size(), np);
  t.dxy.resize(size(), np);
  t.dyy.resize(size(), np);
  std::vector<double> vx(static_cast<std::size_t>(3 * n));
  std::vector<double> vy(static_cast<std::size_t>(3 * n));
  for (Eigen::Index q = 0; q < np; ++q) {
    eval_1d(ref_points[static_cast<std::size_t>(q)].x, vx.data(), vx.data() + n, vx.data() + 2 * n);
    eval_1d(ref_points[static_cast<std::size_t>(q)].y, vy.data(), vy.data() + n, vy.data() + 2 * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int k = i + n * j;
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        const auto un = static_cast<std::size_t>(n);
        t.value(k, q) = vx[ui] * vy[uj];
        t.dx(k, q) = vx[un + ui] * vy[uj];
        t.dy(k, q) = vx[ui] * vy[un + uj];
        t.dxx(k, q) = vx[2 * un + ui] * vy[uj];
        t.dxy(k, q) = vx[un + ui] * vy[un + uj];
        t.dyy(k, q) = vx[ui] * vy[2 * un + uj];
      }
  }
  return t;
}

}  // namespace dgcd
