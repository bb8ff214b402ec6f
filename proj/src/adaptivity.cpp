#include "dgcd/adaptivity.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace dgcd {

namespace {

std::size_t mark_count(std::size_t n, double pct) {
  if (pct <= 0.0) return 0;
  return std::min(n, static_cast<std::size_t>(std::ceil(pct * static_cast<double>(n) / 100.0 - 1e-12)));
}

std::vector<NodeId> ranked(const MeshView& mesh, const std::vector<double>& indicators, double pct, bool largest) {
  if (indicators.size() != mesh.num_cells()) throw std::invalid_argument("marking: one indicator per cell expected");
  std::vector<std::size_t> order(mesh.num_cells());
  std::iota(order.begin(), order.end(), 0);
  // Leaves are sorted by node id, so a stable sort breaks ties by ascending id.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return largest ? indicators[a] > indicators[b] : indicators[a] < indicators[b];
  });
  const std::size_t n = mark_count(order.size(), pct);
  std::vector<NodeId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(mesh.node(order[i]));
  return out;
}

}  // namespace

void AdaptConfig::validate() const {
  if (p < 1 || p > 10) throw Error("p must lie in [1, 10]");
  if (!(gamma > 1.0)) throw Error("gamma must exceed 1");
  if (mesh0 < 1) throw Error("mesh0 must be positive");
  if (n_steps < 1) throw Error("n_steps must be positive");
  if (!(m >= 1.0)) throw Error("m must be at least 1");
  if (!(ref_pct > 0.0 && ref_pct < 100.0)) throw Error("ref_pct must lie in (0, 100)");
  if (!(coar_pct > 0.0 && coar_pct < 100.0)) throw Error("coar_pct must lie in (0, 100)");
  if (std::isfinite(stola) && !(effective_stolb() < stola)) throw Error("stolb must be smaller than stola");
  if (time_points < 1) throw Error("time_points must be positive");
}

std::vector<NodeId> mark_top(const MeshView& mesh, const std::vector<double>& indicators, double pct) {
  return ranked(mesh, indicators, pct, true);
}

std::vector<NodeId> mark_bottom(const MeshView& mesh, const std::vector<double>& indicators, double pct) {
  return ranked(mesh, indicators, pct, false);
}

MeshView refine_and_coarsen(const MeshView& mesh, const std::vector<double>& indicators, double ref_pct,
                            double coar_pct) {
  const std::vector<NodeId> top = mark_top(mesh, indicators, ref_pct);
  std::vector<NodeId> bottom = mark_bottom(mesh, indicators, coar_pct);
  const MeshView refined = top.empty() ? mesh : refine_cells(mesh, top);
  std::erase_if(bottom, [&](NodeId id) {
    return std::find(top.begin(), top.end(), id) != top.end() || !refined.is_leaf(id);
  });
  if (bottom.empty()) return refined;
  return coarsen_cells(refined, bottom);
}

InitialMesh initial_mesh_loop(const ProblemDefinition& problem, BackwardEuler& stepper, const MeshView& start,
                              const AdaptConfig& config) {
  const int q = config.quad.estimator_points(config.p);
  MeshView mesh = start;
  for (int it = 0;; ++it) {
    DGField u0 = stepper.initial(mesh);
    InitialEstimate est = eta_initial(u0, problem.initial, q);
    if (!(std::sqrt(est.eta_sq) > config.initol)) return {mesh, std::move(u0), std::move(est), it};
    if (it >= config.max_initial_iterations)
      throw Error("initial mesh loop: initol not reached after " + std::to_string(it) + " iterations");
    mesh = refine_and_coarsen(mesh, est.indicators, config.init_ref_pct, config.init_coar_pct);
  }
}

GateAction gate_action(double eta_S1, const AdaptConfig& config) {
  if (!std::isfinite(config.stola)) return GateAction::None;
  if (eta_S1 > config.stola) return GateAction::Refine;
  if (eta_S1 > config.effective_stolb()) return GateAction::RefineCoarsen;
  return GateAction::Coarsen;
}

AdaptResult run_algorithm1(const ProblemDefinition& problem, const AdaptConfig& config, const SlabObserver& observer) {
  const MeshView start = MeshView::uniform(problem.domain, config.mesh0, config.mesh0);
  return run_algorithm1(problem, config, start, observer);
}

AdaptResult run_algorithm1(const ProblemDefinition& problem, const AdaptConfig& config, const MeshView& start,
                           const SlabObserver& observer) {
  config.validate();
  BackwardEuler stepper(problem, config.p, StepperConfig{config.gamma, config.quad, config.solver});
  const AlphaWeights w = weights_for(problem);
  const int qe = config.quad.estimator_points(config.p);
  const int qerr = config.quad.error_points(config.p);
  const double T = problem.final_time;
  const double ttol_sq = config.ttol * config.ttol;
  const double min_tau = config.min_tau_fraction * T;
  const double threshold = T / config.m;
  const auto nloc = static_cast<std::size_t>(stepper.basis()->size());

  InitialMesh im = initial_mesh_loop(problem, stepper, start, config);
  EstimatorLedger ledger(w.alpha_T());
  ledger.set_initial(im.estimate.eta_sq);
  std::optional<ErrorReport> error;
  if (config.compute_error && problem.exact) error.emplace();

  std::deque<double> schedule(static_cast<std::size_t>(config.n_steps), T / config.n_steps);
  DGField u = im.u0;
  double t = 0.0;
  double counter = 0.0;
  int j = 0;
  int mesh_changes = 0;
  double total_dofs = 0.0;
  std::vector<StepRecord> records;

  while (!schedule.empty()) {
    double tau = schedule.size() == 1 ? T - t : schedule.front();
    const MeshView mesh_j = u.space.mesh();

    const auto attempt = [&](const MeshView& target) {
      DGField u1 = stepper.step(u, target, t, tau);
      TimeSlab slab = make_slab(j, t, t + tau, u, std::move(u1));
      StepTerms terms = step_terms(slab, problem, config.gamma, w, qe, config.time_points);
      return std::make_pair(std::move(slab), std::move(terms));
    };
    int halvings = 0;
    const auto halve = [&](std::pair<TimeSlab, StepTerms>& st) {
      while (st.second.eta_hat_T_sq > ttol_sq) {
        if (tau / 2.0 < min_tau) throw Error("time step floor reached while halving");
        tau /= 2.0;
        schedule.front() = tau;
        schedule.insert(schedule.begin() + 1, tau);
        ++halvings;
        const MeshView target = st.first.u_new.space.mesh();
        st = attempt(target);
      }
    };

    auto st = attempt(mesh_j);
    halve(st);
    counter += tau;

    bool changed = false;
    if (counter > threshold) {
      const GateAction action = gate_action(std::sqrt(st.second.S1_sq), config);
      if (action != GateAction::None) {
        const double rp = action == GateAction::Coarsen ? 0.0 : config.ref_pct;
        const double cp = action == GateAction::Refine ? 0.0 : config.coar_pct;
        const MeshView candidate = refine_and_coarsen(mesh_j, st.second.indicators, rp, cp);
        if (!candidate.same_leaves(mesh_j)) {
          changed = true;
          ++mesh_changes;
          counter = 0.0;
          st = attempt(candidate);
          halve(st);
        }
      }
    }

    const TimeSlab& slab = st.first;
    const StepTerms& terms = st.second;
    ledger.add(terms);
    StepRecord rec;
    rec.j = j;
    rec.t = t + tau;
    rec.tau = tau;
    rec.lambda = slab.overlay.mesh.num_cells() * nloc;
    rec.cells = slab.u_new.space.mesh().num_cells();
    rec.eta_S1 = std::sqrt(terms.S1_sq);
    rec.eta_T_hat = std::sqrt(terms.eta_hat_T_sq);
    rec.mesh_changed = changed;
    rec.halvings = halvings;
    if (error) {
      rec.error_sq = energy_error_sq_interval(slab, *problem.exact, problem.epsilon, problem.beta, config.gamma, qerr,
                                              config.time_points);
      error->add(rec.error_sq);
    }
    total_dofs += tau * static_cast<double>(rec.lambda);
    records.push_back(rec);
    if (observer) observer(slab, terms, rec);

    u = slab.u_new;
    t += tau;
    schedule.pop_front();
    ++j;
  }

  const EstimatorTotals totals = ledger.totals();
  return AdaptResult{im.mesh,  im.iterations, std::move(im.estimate), std::move(records), ledger, totals,
                     error,    total_dofs,    mesh_changes,           std::move(u)};
}

}  // namespace dgcd
