#pragma once

// Benchmark problems for u_t - eps*Lap(u) + a.grad(u) + b*u = f with
// homogeneous Dirichlet data, plus a manufactured-solution generator.

#include <functional>
#include <optional>
#include <string>

#include "dgcd/common.hpp"

namespace dgcd {

using ScalarFn = std::function<double(double x, double y, double t)>;
using VectorFn = std::function<Vec2(double x, double y, double t)>;
using InitialFn = std::function<double(double x, double y)>;

/// Closed-form solution with the derivatives needed to build a forcing term
/// and to measure errors.
struct ExactSolution {
  ScalarFn value;
  ScalarFn time_derivative;
  VectorFn gradient;
  ScalarFn laplacian;
};

struct ProblemDefinition {
  std::string name;
  Rect domain;
  double final_time = 1.0;
  double epsilon = 1.0;
  VectorFn wind;
  ScalarFn wind_divergence;
  ScalarFn reaction;
  ScalarFn forcing;
  InitialFn initial;
  double beta = 0.0;   // lower bound of b - div(a)/2
  double c_star = 0.0; // stored only
  /// Wind and reaction do not depend on t (lets the spatial operator be reused).
  bool autonomous_operator = false;
  std::optional<ExactSolution> exact;
};

/// Boundary-layer problem on (0,1)^2 with a = (1,1), b = 0, T = 10.
ProblemDefinition example1(double epsilon);

/// Example 1's data with the time factor dropped: u = g(x) g(y), f = g(x) + g(y).
ProblemDefinition example1_steady(double epsilon);

/// Oscillatory forcing on (-1,1)^2: a = (1,1), b = 1, f = sin(5t) x y, T = 2*pi.
ProblemDefinition example2(double epsilon);

/// Rotating Gaussian on (-1,1)^2: a = (y,-x), b = 0, f = 0, T = 100.
ProblemDefinition example3(double epsilon);

/// Rotating wind on (0,1)^2: a = (sin t, cos t), b = 0, f = 1, T = 2*pi.
ProblemDefinition example4(double epsilon);

/// Problem whose exact solution is `u`; f = u_t - eps*Lap(u) + a.grad(u) + b*u.
ProblemDefinition manufactured(std::string name, const ExactSolution& u, double epsilon, VectorFn wind,
                               ScalarFn wind_divergence, ScalarFn reaction, const Rect& domain,
                               double final_time, double beta);

/// Looks a problem up by name: example1..example4, example1_steady,
/// manufactured:zero, manufactured:poly, manufactured:poly_t.
ProblemDefinition make_problem(const std::string& name, double epsilon);

/// x(1-x)y(1-y), optionally multiplied by t.
ExactSolution bubble_solution(bool linear_in_time);

}  // namespace dgcd
