#include "dgcd/time_stepper.hpp"

#include "dgcd/local_tables.hpp"

namespace dgcd {

TimeSlab make_slab(int index, double t0, double t1, DGField u_old, DGField u_new) {
  if (!(t1 > t0)) throw std::invalid_argument("make_slab: t1 must exceed t0");
  Overlay ov = overlay(u_old.space.mesh(), u_new.space.mesh());
  return TimeSlab{index, t0, t1, std::move(u_old), std::move(u_new), std::move(ov)};
}

Eigen::VectorXd cross_mesh_mass_rhs(const DGField& u_old, const DGSpace& space, int q) {
  const Overlay ov = overlay(u_old.space.mesh(), space.mesh());
  const Rule1D rule = gauss_legendre(q);
  const auto n = static_cast<Eigen::Index>(space.layout().block);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.num_dofs()));
  for (std::size_t k = 0; k < ov.mesh.num_cells(); ++k) {
    const Rect region = ov.mesh.cell_rect(k);
    const std::size_t ka = ov.cell_in_a[k];
    const std::size_t kb = ov.cell_in_b[k];
    const PointSet ps = cell_points(rule, region);
    const ShapeTables sa = cell_shapes(u_old.space.basis(), rule, region, u_old.space.mesh().cell_rect(ka));
    const ShapeTables sb = cell_shapes(space.basis(), rule, region, space.mesh().cell_rect(kb));
    const Eigen::VectorXd wu = ps.weights.cwiseProduct(sa.value * u_old.block(ka));
    out.segment(static_cast<Eigen::Index>(kb) * n, n) += sb.value.transpose() * wu;
  }
  return out;
}

BackwardEuler::BackwardEuler(ProblemDefinition problem, int degree, StepperConfig config)
    : problem_(std::move(problem)), basis_(std::make_shared<TensorBasis>(degree)), config_(std::move(config)) {}

DGField BackwardEuler::initial(const MeshView& mesh) const {
  DGSpace sp = space(mesh);
  Eigen::VectorXd c = l2_project(sp, problem_.initial, config_.quad.estimator_points(degree()));
  return DGField{std::move(sp), std::move(c)};
}

DGField BackwardEuler::step(const DGField& u_old, const MeshView& new_mesh, double t0, double tau,
                            SolverStats* stats) {
  if (!(tau > 0.0)) throw std::invalid_argument("BackwardEuler::step: tau must be positive");
  const double t1 = t0 + tau;
  const int p = degree();
  DGSpace sp = space(new_mesh);

  if (!cache_.has_mass || cache_.mesh_id != new_mesh.id()) {
    cache_ = Cache{};
    cache_.mesh_id = new_mesh.id();
    cache_.mass = assemble_mass(sp, config_.quad.assembly_points(p));
    cache_.has_mass = true;
  }
  const bool frozen = problem_.autonomous_operator;
  if (!cache_.operator_time || (!frozen && *cache_.operator_time != t1)) {
    cache_.spatial = assemble_spatial_operator(sp, problem_, t1, config_.gamma, config_.quad.assembly_points(p));
    cache_.operator_time = t1;
    cache_.has_system = false;
  }
  if (!cache_.has_system || cache_.system_tau != tau) {
    cache_.system = cache_.spatial;
    cache_.system.add_scaled(1.0 / tau, cache_.mass);
    cache_.system_tau = tau;
    cache_.has_system = true;
    const PreconditionerKind kind = sp.layout().block > 1 ? config_.solver.preconditioner : PreconditionerKind::None;
    cache_.prec = std::make_shared<BlockPreconditioner>(cache_.system, kind);
  }

  const int q = config_.quad.estimator_points(p);
  Eigen::VectorXd rhs = assemble_load(sp, problem_, t1, q);
  if (u_old.space.mesh().same_leaves(new_mesh))
    rhs += (1.0 / tau) * (cache_.mass * u_old.coeffs);
  else
    rhs += (1.0 / tau) * cross_mesh_mass_rhs(u_old, sp, q);

  Eigen::VectorXd x;
  if (u_old.space.mesh().same_leaves(new_mesh)) x = u_old.coeffs;
  const SolverStats st = gmres_solve(cache_.system, rhs, x, config_.solver, cache_.prec.get());
  if (stats) *stats = st;
  return DGField{std::move(sp), std::move(x)};
}

double SlabInterpolant::weight_old(double t) const {
  if (t < slab_->t0 - 1e-14 * std::abs(slab_->t1) || t > slab_->t1 + 1e-14 * std::abs(slab_->t1))
    throw std::out_of_range("SlabInterpolant: time outside the slab");
  return (slab_->t1 - t) / slab_->tau();
}

double SlabInterpolant::value(Vec2 p, double t) const {
  const double w = weight_old(t);
  return w * slab_->u_old.value(p) + (1.0 - w) * slab_->u_new.value(p);
}

}  // namespace dgcd
