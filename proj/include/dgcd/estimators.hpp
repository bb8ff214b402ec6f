#pragma once

// A posteriori estimators: initial-condition term, per-step spatial and
// temporal terms on the overlay of consecutive meshes, their accumulation,
// and the estimator for the stationary problem.

#include <limits>
#include <vector>

#include "dgcd/dg_operator.hpp"
#include "dgcd/time_stepper.hpp"

namespace dgcd {

/// alpha_K = min(h eps^{-1/2}, beta^{-1/2}) etc.; beta = 0 means beta^{-1/2} = inf.
struct AlphaWeights {
  double epsilon = 1.0;
  double beta = 0.0;

  double beta_inv_sqrt() const {
    return beta > 0.0 ? 1.0 / std::sqrt(beta) : std::numeric_limits<double>::infinity();
  }
  double alpha_K(double h) const { return std::min(h / std::sqrt(epsilon), beta_inv_sqrt()); }
  double alpha_E(double h) const { return alpha_K(h); }
  double alpha_T() const { return std::min(1.0 / std::sqrt(epsilon), beta_inv_sqrt()); }
  /// gamma*eps/h + beta*h + h/eps
  double jump_weight(double gamma, double h) const { return gamma * epsilon / h + beta * h + h / epsilon; }
};

AlphaWeights weights_for(const ProblemDefinition& problem);

struct InitialEstimate {
  double eta_sq = 0.0;
  double l2_sq = 0.0;    // ||u0 - u_h^0||^2
  double jump_sq = 0.0;  // sum h_E ||[u_h^0]||^2
  std::vector<double> indicators;  // per cell of u_h^0's mesh
};

InitialEstimate eta_initial(const DGField& uh0, const InitialFn& u0, int q);

/// Gauss rule on [t0, t1] (3 points unless stated otherwise).
struct TimeRule {
  std::vector<double> times;
  std::vector<double> weights;
};
TimeRule time_rule(double t0, double t1, int points = 3);

struct SpatialTerm {
  double eta_sq = 0.0;
  std::vector<double> indicators;          // per cell of mesh_{j+1}
  std::vector<double> overlay_indicators;  // per overlay cell
};

struct TimeIntegrals {
  double integral = 0.0;     // int eta dt (pointwise square root)
  double integral_sq = 0.0;  // int eta^2 dt
};

struct TemporalTerm {
  double tau_T1_sq = 0.0;  // tau * eta_T1^2
  TimeIntegrals T2;
  double eta_hat_sq = 0.0;
};

SpatialTerm eta_S1_step(const TimeSlab& slab, const ProblemDefinition& problem, double gamma,
                        const AlphaWeights& w, int q);
TimeIntegrals eta_S2_step(const TimeSlab& slab, const ProblemDefinition& problem, int q, int time_points = 3);
TemporalTerm eta_T_step(const TimeSlab& slab, const ProblemDefinition& problem, const AlphaWeights& w, int q,
                        int time_points = 3);

struct StepTerms {
  int j = 0;
  double tau = 0.0;
  double S1_sq = 0.0;
  std::vector<double> indicators;  // per cell of mesh_{j+1}
  TimeIntegrals S2;
  double tau_T1_sq = 0.0;
  TimeIntegrals T2;
  double eta_hat_T_sq = 0.0;
};

StepTerms step_terms(const TimeSlab& slab, const ProblemDefinition& problem, double gamma, const AlphaWeights& w,
                     int q, int time_points = 3);

struct EstimatorTotals {
  double eta_I_sq = 0.0;
  double eta_S_sq = 0.0;
  double eta_T_sq = 0.0;
  double eta_sq = 0.0;
};

/// Running sums over accepted steps with the min{.,.} closures at the end.
class EstimatorLedger {
 public:
  explicit EstimatorLedger(double alpha_T = 1.0) : alpha_T_(alpha_T) {}

  void set_initial(double eta_I_sq) { eta_I_sq_ = eta_I_sq; }
  void add(const StepTerms& s);

  double S1() const { return S1_; }
  double L2a() const { return L2a_; }
  double L2b() const { return L2b_; }
  double Ta() const { return Ta_; }
  double Tb() const { return Tb_; }
  double Tc() const { return Tc_; }
  std::size_t steps() const { return steps_; }

  EstimatorTotals totals() const;

 private:
  double alpha_T_;
  double eta_I_sq_ = 0.0;
  double S1_ = 0.0, L2a_ = 0.0, L2b_ = 0.0, Ta_ = 0.0, Tb_ = 0.0, Tc_ = 0.0;
  std::size_t steps_ = 0;
};

/// Solves (B + K_h)(u, v) = (f(t), v) on a space.
DGField stationary_solve(const DGSpace& space, const ProblemDefinition& problem, double gamma, double t = 0.0,
                         const QuadratureOrders& quad = {}, const SolverConfig& solver = {});

struct StationaryEstimate {
  double eta_sq = 0.0;
  std::vector<double> indicators;
};

StationaryEstimate stationary_estimator(const DGField& u, const ProblemDefinition& problem, double gamma,
                                        const AlphaWeights& w, int q, double t = 0.0);

}  // namespace dgcd
