#pragma once

#include <string>
#include <vector>

#include "dgcd/estimators.hpp"
#include "dgcd/time_stepper.hpp"

namespace dgcd {

/// |||v|||^2 = sum_K (eps ||grad v||^2 + beta ||v||^2) + sum_E eps*gamma/h_E ||[v]||^2.
double energy_norm_sq(const DGField& v, double epsilon, double beta, double gamma, int q);

/// |||u(., t) - v|||^2 for a fixed-time field (stationary problems).
double energy_error_sq(const DGField& v, const ExactSolution& exact, double t, double epsilon, double beta,
                       double gamma, int q);

/// int_{t0}^{t1} |||u - u_h(t)|||^2 dt with u_h linear in time, Gauss in time,
/// spatial integrals on the overlay of the slab.
double energy_error_sq_interval(const TimeSlab& slab, const ExactSolution& exact, double epsilon, double beta,
                                double gamma, int q, int time_points = 3);

struct ErrorReport {
  double total_sq = 0.0;
  std::vector<double> per_slab;

  void add(double slab_sq) {
    per_slab.push_back(slab_sq);
    total_sq += slab_sq;
  }
};

struct Effectivity {
  enum class Kind { Value, Exact, Undefined };
  Kind kind = Kind::Undefined;
  double value = 0.0;

  std::string str() const;
};

/// sqrt(eta_sq) / sqrt(error_sq); both zero gives Exact, zero error alone Undefined.
Effectivity effectivity(double eta_sq, double error_sq);

}  // namespace dgcd
