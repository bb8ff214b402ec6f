#include "dgcd/estimators.hpp"

#include <algorithm>

#include "dgcd/local_tables.hpp"

namespace dgcd {

namespace {

using Vec = Eigen::VectorXd;

struct Fields {
  Vec u1, u1x, u1y, lap1;  // new solution
  Vec d, dx, dy;           // delta = new - old
};

Fields cell_fields(const TimeSlab& slab, const Rule1D& rule, std::size_t k) {
  const Overlay& ov = slab.overlay;
  const Rect region = ov.mesh.cell_rect(k);
  const std::size_t ka = ov.cell_in_a[k];
  const std::size_t kb = ov.cell_in_b[k];
  const ShapeTables sa = cell_shapes(slab.u_old.space.basis(), rule, region, slab.u_old.space.mesh().cell_rect(ka));
  const ShapeTables sb =
      cell_shapes(slab.u_new.space.basis(), rule, region, slab.u_new.space.mesh().cell_rect(kb), true);
  const auto ca = slab.u_old.block(ka);
  const auto cb = slab.u_new.block(kb);
  Fields f;
  f.u1 = sb.value * cb;
  f.u1x = sb.dx * cb;
  f.u1y = sb.dy * cb;
  f.lap1 = sb.laplacian * cb;
  f.d = f.u1 - sa.value * ca;
  f.dx = f.u1x - sa.dx * ca;
  f.dy = f.u1y - sa.dy * ca;
  return f;
}

struct Traces {
  Vec u1, d, dn1;  // one side's values of u_new, delta and n . grad(u_new)
};

Traces edge_traces(const TimeSlab& slab, const Rule1D& rule, const EdgeSegment& e, std::size_t overlay_cell) {
  const Overlay& ov = slab.overlay;
  const std::size_t ka = ov.cell_in_a[overlay_cell];
  const std::size_t kb = ov.cell_in_b[overlay_cell];
  const ShapeTables sa = edge_shapes(slab.u_old.space.basis(), rule, e, slab.u_old.space.mesh().cell_rect(ka));
  const ShapeTables sb = edge_shapes(slab.u_new.space.basis(), rule, e, slab.u_new.space.mesh().cell_rect(kb));
  const auto cb = slab.u_new.block(kb);
  Traces t;
  t.u1 = sb.value * cb;
  t.d = t.u1 - sa.value * slab.u_old.block(ka);
  t.dn1 = e.normal.x * (sb.dx * cb) + e.normal.y * (sb.dy * cb);
  return t;
}

// Everything the estimators need from one slab, in one pass over the overlay.
struct SlabEvaluation {
  double S1_sq = 0.0;
  std::vector<double> overlay_indicators;
  TimeIntegrals S2;
  double T1_sq = 0.0;
  TimeIntegrals T2;
};

SlabEvaluation evaluate(const TimeSlab& slab, const ProblemDefinition& pb, double gamma, const AlphaWeights& w,
                        int q, int time_points) {
  const Overlay& ov = slab.overlay;
  const Rule1D rule = gauss_legendre(q);
  const TimeRule tr = time_rule(slab.t0, slab.t1, time_points);
  const std::size_t nt = tr.times.size();
  const double t1 = slab.t1;
  const double tau = slab.tau();
  const double eps = pb.epsilon;

  SlabEvaluation out;
  out.overlay_indicators.assign(ov.mesh.num_cells(), 0.0);
  std::vector<double> s2_t(nt, 0.0);
  std::vector<double> t2_t(nt, 0.0);
  std::vector<double> lw(nt);
  for (std::size_t g = 0; g < nt; ++g) lw[g] = (t1 - tr.times[g]) / tau;

  for (std::size_t k = 0; k < ov.mesh.num_cells(); ++k) {
    const Rect region = ov.mesh.cell_rect(k);
    const PointSet ps = cell_points(rule, region);
    const Fields f = cell_fields(slab, rule, k);
    const double hK = region.diameter();
    const double aK = w.alpha_K(hK);
    double res = 0.0;
    double grad_d = 0.0;
    for (Eigen::Index i = 0; i < ps.weights.size(); ++i) {
      const Vec2 p = ps.points[static_cast<std::size_t>(i)];
      const double wt = ps.weights(i);
      const Vec2 a1 = pb.wind(p.x, p.y, t1);
      const double b1 = pb.reaction(p.x, p.y, t1);
      const double f1 = pb.forcing(p.x, p.y, t1);
      const double r = f1 - f.d(i) / tau + eps * f.lap1(i) - (a1.x * f.u1x(i) + a1.y * f.u1y(i)) - b1 * f.u1(i);
      res += wt * r * r;
      grad_d += wt * (f.dx(i) * f.dx(i) + f.dy(i) * f.dy(i));
      for (std::size_t g = 0; g < nt; ++g) {
        const double t = tr.times[g];
        const Vec2 a = pb.wind(p.x, p.y, t);
        const double b = pb.reaction(p.x, p.y, t);
        const double ft = pb.forcing(p.x, p.y, t);
        const double r2 = lw[g] * (a.x * f.dx(i) + a.y * f.dy(i) + b * f.d(i)) + ft - f1 +
                          (a1.x - a.x) * f.u1x(i) + (a1.y - a.y) * f.u1y(i) + (b1 - b) * f.u1(i);
        t2_t[g] += wt * r2 * r2;
      }
    }
    const double cell_term = aK * aK * res;
    out.S1_sq += cell_term;
    out.overlay_indicators[k] += cell_term;
    out.T1_sq += eps * grad_d;
  }

  for (const auto& e : ov.mesh.edges()) {
    const PointSet ps = edge_points(rule, e);
    const double hE = e.length;
    const Traces L = edge_traces(slab, rule, e, e.left);
    Vec ju = L.u1;
    Vec jd = L.d;
    Vec jn;
    if (!e.boundary()) {
      const Traces R = edge_traces(slab, rule, e, *e.right);
      ju -= R.u1;
      jd -= R.d;
      jn = L.dn1 - R.dn1;
    }
    const auto& W = ps.weights;
    double term = w.jump_weight(gamma, hE) * (W.dot(ju.cwiseAbs2()) + W.dot(jd.cwiseAbs2()));
    if (!e.boundary()) term += std::pow(eps, 1.5) * w.alpha_E(hE) * W.dot(jn.cwiseAbs2());
    out.S1_sq += term;
    if (e.boundary()) {
      out.overlay_indicators[e.left] += term;
    } else {
      out.overlay_indicators[e.left] += 0.5 * term;
      out.overlay_indicators[*e.right] += 0.5 * term;
    }

    const double s2_const = hE * W.dot(jd.cwiseAbs2()) / (tau * tau);
    for (std::size_t g = 0; g < nt; ++g) s2_t[g] += s2_const;
    if (e.boundary()) continue;
    for (std::size_t g = 0; g < nt; ++g) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < W.size(); ++i) {
        const Vec2 p = ps.points[static_cast<std::size_t>(i)];
        const double an = dot(pb.wind(p.x, p.y, tr.times[g]), e.normal);
        const double an1 = dot(pb.wind(p.x, p.y, t1), e.normal);
        const double v = lw[g] * an * jd(i) + (an1 - an) * ju(i);
        acc += W(i) * v * v;
      }
      s2_t[g] += acc / hE;
    }
  }

  for (std::size_t g = 0; g < nt; ++g) {
    out.S2.integral += tr.weights[g] * std::sqrt(s2_t[g]);
    out.S2.integral_sq += tr.weights[g] * s2_t[g];
    out.T2.integral += tr.weights[g] * std::sqrt(t2_t[g]);
    out.T2.integral_sq += tr.weights[g] * t2_t[g];
  }
  return out;
}

std::vector<double> to_new_mesh(const TimeSlab& slab, const std::vector<double>& overlay_values) {
  std::vector<double> out(slab.u_new.space.mesh().num_cells(), 0.0);
  for (std::size_t k = 0; k < overlay_values.size(); ++k) out[slab.overlay.cell_in_b[k]] += overlay_values[k];
  return out;
}

double eta_hat_sq(double tau_T1_sq, double T2_sq_integral, const AlphaWeights& w, double final_time) {
  return 0.25 * tau_T1_sq + std::min(w.alpha_T(), final_time) * T2_sq_integral;
}

}  // namespace

AlphaWeights weights_for(const ProblemDefinition& problem) { return {problem.epsilon, problem.beta}; }

InitialEstimate eta_initial(const DGField& uh0, const InitialFn& u0, int q) {
  const MeshView& mesh = uh0.space.mesh();
  const Rule1D rule = gauss_legendre(q);
  InitialEstimate est;
  est.indicators.assign(mesh.num_cells(), 0.0);
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const Rect r = mesh.cell_rect(k);
    const PointSet ps = cell_points(rule, r);
    const ShapeTables s = cell_shapes(uh0.space.basis(), rule, r, r);
    const Vec uh = s.value * uh0.block(k);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < uh.size(); ++i) {
      const Vec2 p = ps.points[static_cast<std::size_t>(i)];
      const double e = u0(p.x, p.y) - uh(i);
      acc += ps.weights(i) * e * e;
    }
    est.l2_sq += acc;
    est.indicators[k] += acc;
  }
  for (const auto& e : mesh.edges()) {
    const PointSet ps = edge_points(rule, e);
    Vec jump = edge_shapes(uh0.space.basis(), rule, e, mesh.cell_rect(e.left)).value * uh0.block(e.left);
    if (!e.boundary())
      jump -= edge_shapes(uh0.space.basis(), rule, e, mesh.cell_rect(*e.right)).value * uh0.block(*e.right);
    const double term = e.length * ps.weights.dot(jump.cwiseAbs2());
    est.jump_sq += term;
    if (e.boundary()) {
      est.indicators[e.left] += term;
    } else {
      est.indicators[e.left] += 0.5 * term;
      est.indicators[*e.right] += 0.5 * term;
    }
  }
  est.eta_sq = est.l2_sq + est.jump_sq;
  return est;
}

TimeRule time_rule(double t0, double t1, int points) {
  const Rule1D r = gauss_legendre(points);
  TimeRule tr;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    tr.times.push_back(t0 + 0.5 * (r.points[i] + 1.0) * (t1 - t0));
    tr.weights.push_back(0.5 * (t1 - t0) * r.weights[i]);
  }
  return tr;
}

SpatialTerm eta_S1_step(const TimeSlab& slab, const ProblemDefinition& problem, double gamma,
                        const AlphaWeights& w, int q) {
  SlabEvaluation ev = evaluate(slab, problem, gamma, w, q, 1);
  SpatialTerm s;
  s.eta_sq = ev.S1_sq;
  s.indicators = to_new_mesh(slab, ev.overlay_indicators);
  s.overlay_indicators = std::move(ev.overlay_indicators);
  return s;
}

TimeIntegrals eta_S2_step(const TimeSlab& slab, const ProblemDefinition& problem, int q, int time_points) {
  return evaluate(slab, problem, 10.0, weights_for(problem), q, time_points).S2;
}

TemporalTerm eta_T_step(const TimeSlab& slab, const ProblemDefinition& problem, const AlphaWeights& w, int q,
                        int time_points) {
  const SlabEvaluation ev = evaluate(slab, problem, 10.0, w, q, time_points);
  TemporalTerm t;
  t.tau_T1_sq = slab.tau() * ev.T1_sq;
  t.T2 = ev.T2;
  t.eta_hat_sq = eta_hat_sq(t.tau_T1_sq, t.T2.integral_sq, w, problem.final_time);
  return t;
}

StepTerms step_terms(const TimeSlab& slab, const ProblemDefinition& problem, double gamma, const AlphaWeights& w,
                     int q, int time_points) {
  const SlabEvaluation ev = evaluate(slab, problem, gamma, w, q, time_points);
  StepTerms s;
  s.j = slab.index;
  s.tau = slab.tau();
  s.S1_sq = ev.S1_sq;
  s.indicators = to_new_mesh(slab, ev.overlay_indicators);
  s.S2 = ev.S2;
  s.tau_T1_sq = s.tau * ev.T1_sq;
  s.T2 = ev.T2;
  s.eta_hat_T_sq = eta_hat_sq(s.tau_T1_sq, s.T2.integral_sq, w, problem.final_time);
  return s;
}

void EstimatorLedger::add(const StepTerms& s) {
  S1_ += s.tau * s.S1_sq;
  L2a_ += s.S2.integral;
  L2b_ += s.S2.integral_sq;
  Ta_ += 0.25 * s.tau_T1_sq;
  Tb_ += s.T2.integral;
  Tc_ += s.T2.integral_sq;
  ++steps_;
}

EstimatorTotals EstimatorLedger::totals() const {
  EstimatorTotals t;
  const double a2 = alpha_T_ * alpha_T_;
  t.eta_I_sq = eta_I_sq_;
  t.eta_S_sq = S1_ + std::min(L2a_ * L2a_, a2 * L2b_);
  t.eta_T_sq = Ta_ + std::min(Tb_ * Tb_, a2 * Tc_);
  t.eta_sq = t.eta_I_sq + t.eta_S_sq + t.eta_T_sq;
  return t;
}

DGField stationary_solve(const DGSpace& space, const ProblemDefinition& problem, double gamma, double t,
                         const QuadratureOrders& quad, const SolverConfig& solver) {
  const int p = space.degree();
  const SparseMatrixCSR A = assemble_spatial_operator(space, problem, t, gamma, quad.assembly_points(p));
  const Vec F = assemble_load(space, problem, t, quad.estimator_points(p));
  Vec x;
  gmres_solve(A, F, x, solver);
  return DGField{space, std::move(x)};
}

StationaryEstimate stationary_estimator(const DGField& u, const ProblemDefinition& problem, double gamma,
                                        const AlphaWeights& w, int q, double t) {
  // A slab whose two ends coincide has delta = 0, so its spatial term is the
  // stationary estimator with data frozen at t.
  const TimeSlab slab = make_slab(0, t - 1.0, t, u, u);
  SpatialTerm s = eta_S1_step(slab, problem, gamma, w, q);
  return {s.eta_sq, std::move(s.indicators)};
}

}  // namespace dgcd
