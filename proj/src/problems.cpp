#include "dgcd/problems.hpp"

#include <numbers>

namespace dgcd {

namespace {

// Layer profile g(s) = (e^{(s-1)/eps} - 1)/(e^{-1/eps} - 1) + s - 1, which
// solves -eps g'' + g' = 1 with g(0) = g(1) = 0.
struct LayerProfile {
  double eps;
  double denom;

  explicit LayerProfile(double e) : eps(e), denom(std::expm1(-1.0 / e)) {}
  double value(double s) const { return std::expm1((s - 1.0) / eps) / denom + s - 1.0; }
  double d1(double s) const { return std::exp((s - 1.0) / eps) / (eps * denom) + 1.0; }
  double d2(double s) const { return std::exp((s - 1.0) / eps) / (eps * eps * denom); }
};

ScalarFn constant(double c) {
  return [c](double, double, double) { return c; };
}

VectorFn constant_wind(Vec2 a) {
  return [a](double, double, double) { return a; };
}

}  // namespace

ProblemDefinition manufactured(std::string name, const ExactSolution& u, double epsilon, VectorFn wind,
                               ScalarFn wind_divergence, ScalarFn reaction, const Rect& domain,
                               double final_time, double beta) {
  ProblemDefinition p;
  p.name = std::move(name);
  p.domain = domain;
  p.final_time = final_time;
  p.epsilon = epsilon;
  p.wind = std::move(wind);
  p.wind_divergence = std::move(wind_divergence);
  p.reaction = std::move(reaction);
  p.beta = beta;
  p.exact = u;
  p.forcing = [u, epsilon, a = p.wind, b = p.reaction](double x, double y, double t) {
    return u.time_derivative(x, y, t) - epsilon * u.laplacian(x, y, t) + dot(a(x, y, t), u.gradient(x, y, t)) +
           b(x, y, t) * u.value(x, y, t);
  };
  p.initial = [v = u.value](double x, double y) { return v(x, y, 0.0); };
  return p;
}

ExactSolution bubble_solution(bool linear_in_time) {
  ExactSolution u;
  const auto s = [linear_in_time](double t) { return linear_in_time ? t : 1.0; };
  const auto ds = [linear_in_time](double) { return linear_in_time ? 1.0 : 0.0; };
  u.value = [s](double x, double y, double t) { return s(t) * x * (1 - x) * y * (1 - y); };
  u.time_derivative = [ds](double x, double y, double t) { return ds(t) * x * (1 - x) * y * (1 - y); };
  u.gradient = [s](double x, double y, double t) {
    return Vec2{s(t) * (1 - 2 * x) * y * (1 - y), s(t) * x * (1 - x) * (1 - 2 * y)};
  };
  u.laplacian = [s](double x, double y, double t) { return s(t) * (-2 * y * (1 - y) - 2 * x * (1 - x)); };
  return u;
}

ProblemDefinition example1(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error("example1: epsilon must lie in (0, 1]");
  const LayerProfile g(epsilon);
  ProblemDefinition p;
  p.name = "example1";
  p.domain = {0.0, 1.0, 0.0, 1.0};
  p.final_time = 10.0;
  p.epsilon = epsilon;
  p.wind = constant_wind({1.0, 1.0});
  p.wind_divergence = constant(0.0);
  p.reaction = constant(0.0);
  p.beta = 0.0;
  p.autonomous_operator = true;
  p.initial = [](double, double) { return 0.0; };
  // -eps g'' + g' = 1 in each direction, so f = e^{-t} g g + (1 - e^{-t}) (g(x) + g(y)).
  p.forcing = [g](double x, double y, double t) {
    const double gx = g.value(x);
    const double gy = g.value(y);
    return std::exp(-t) * gx * gy - std::expm1(-t) * (gx + gy);
  };
  ExactSolution u;
  u.value = [g](double x, double y, double t) { return -std::expm1(-t) * g.value(x) * g.value(y); };
  u.time_derivative = [g](double x, double y, double t) { return std::exp(-t) * g.value(x) * g.value(y); };
  u.gradient = [g](double x, double y, double t) {
    const double s = -std::expm1(-t);
    return Vec2{s * g.d1(x) * g.value(y), s * g.value(x) * g.d1(y)};
  };
  u.laplacian = [g](double x, double y, double t) {
    return -std::expm1(-t) * (g.d2(x) * g.value(y) + g.value(x) * g.d2(y));
  };
  p.exact = u;
  return p;
}

ProblemDefinition example1_steady(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error("example1_steady: epsilon must lie in (0, 1]");
  const LayerProfile g(epsilon);
  ExactSolution u;
  u.value = [g](double x, double y, double) { return g.value(x) * g.value(y); };
  u.time_derivative = [](double, double, double) { return 0.0; };
  u.gradient = [g](double x, double y, double) { return Vec2{g.d1(x) * g.value(y), g.value(x) * g.d1(y)}; };
  u.laplacian = [g](double x, double y, double) { return g.d2(x) * g.value(y) + g.value(x) * g.d2(y); };
  auto p = manufactured("example1_steady", u, epsilon, constant_wind({1.0, 1.0}), constant(0.0), constant(0.0),
                        {0.0, 1.0, 0.0, 1.0}, 10.0, 0.0);
  p.forcing = [g](double x, double y, double) { return g.value(x) + g.value(y); };
  p.autonomous_operator = true;
  return p;
}

ProblemDefinition example2(double epsilon) {
  ProblemDefinition p;
  p.name = "example2";
  p.domain = {-1.0, 1.0, -1.0, 1.0};
  p.final_time = 2.0 * std::numbers::pi;
  p.epsilon = epsilon;
  p.wind = constant_wind({1.0, 1.0});
  p.wind_divergence = constant(0.0);
  p.reaction = constant(1.0);
  p.forcing = [](double x, double y, double t) { return std::sin(5.0 * t) * x * y; };
  p.initial = [](double, double) { return 0.0; };
  p.beta = 1.0;
  p.c_star = 1.0;
  p.autonomous_operator = true;
  return p;
}

ProblemDefinition example3(double epsilon) {
  ProblemDefinition p;
  p.name = "example3";
  p.domain = {-1.0, 1.0, -1.0, 1.0};
  p.final_time = 100.0;
  p.epsilon = epsilon;
  p.wind = [](double x, double y, double) { return Vec2{y, -x}; };
  p.wind_divergence = constant(0.0);
  p.reaction = constant(0.0);
  p.forcing = constant(0.0);
  p.initial = [](double x, double y) {
    return std::exp(-64.0 * (x - 0.5) * (x - 0.5)) * std::exp(-64.0 * (y - 0.5) * (y - 0.5));
  };
  p.beta = 0.0;
  p.autonomous_operator = true;
  return p;
}

ProblemDefinition example4(double epsilon) {
  ProblemDefinition p;
  p.name = "example4";
  p.domain = {0.0, 1.0, 0.0, 1.0};
  p.final_time = 2.0 * std::numbers::pi;
  p.epsilon = epsilon;
  p.wind = [](double, double, double t) { return Vec2{std::sin(t), std::cos(t)}; };
  p.wind_divergence = constant(0.0);
  p.reaction = constant(0.0);
  p.forcing = constant(1.0);
  p.initial = [](double, double) { return 0.0; };
  p.beta = 0.0;
  return p;
}

ProblemDefinition make_problem(const std::string& name, double epsilon) {
  if (name == "example1") return example1(epsilon);
  if (name == "example1_steady") return example1_steady(epsilon);
  if (name == "example2") return example2(epsilon);
  if (name == "example3") return example3(epsilon);
  if (name == "example4") return example4(epsilon);
  const Rect unit{0.0, 1.0, 0.0, 1.0};
  if (name == "manufactured:zero") {
    ExactSolution u;
    u.value = constant(0.0);
    u.time_derivative = constant(0.0);
    u.gradient = constant_wind({0.0, 0.0});
    u.laplacian = constant(0.0);
    auto p = manufactured(name, u, epsilon, constant_wind({0.0, 0.0}), constant(0.0), constant(0.0), unit, 1.0, 0.0);
    p.autonomous_operator = true;
    return p;
  }
  if (name == "manufactured:poly" || name == "manufactured:poly_t") {
    auto p = manufactured(name, bubble_solution(name == "manufactured:poly_t"), epsilon, constant_wind({1.0, 1.0}),
                          constant(0.0), constant(0.0), unit, 1.0, 0.0);
    p.autonomous_operator = true;
    return p;
  }
  throw Error("unknown problem '" + name + "'");
}

}  // namespace dgcd
