#include <doctest.h>

#include "dgcd/error_norms.hpp"
#include "helpers.hpp"

using namespace dgcd;
using namespace testing;

namespace {

std::shared_ptr<TensorBasis> basis(int p) { return std::make_shared<TensorBasis>(p); }

DGField zero_field(const DGSpace& s) { return {s, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.num_dofs()))}; }

ExactSolution scaled_bubble(double c) {
  const ExactSolution b = bubble_solution(false);
  return {[=](double x, double y, double t) { return c * b.value(x, y, t); },
          [](double, double, double) { return 0.0; },
          [=](double x, double y, double t) { return c * b.gradient(x, y, t); },
          [=](double x, double y, double t) { return c * b.laplacian(x, y, t); }};
}

}  // namespace

TEST_CASE("error of the exact discrete solution is zero") {
  const DGSpace s(MeshView::uniform(unit_square(), 3, 3), basis(2));
  const ExactSolution b = bubble_solution(false);
  const DGField u{s, l2_project(s, [&](double x, double y) { return b.value(x, y, 0); }, 5)};
  const TimeSlab slab = make_slab(0, 0.0, 0.5, u, u);
  CHECK(energy_error_sq_interval(slab, b, 1.0, 1.0, 10.0, 6) < 1e-26);
  CHECK(energy_error_sq(u, b, 0.0, 1.0, 1.0, 10.0, 6) < 1e-26);
}

TEST_CASE("error of a zero field against c * bubble in closed form") {
  // int |grad b|^2 = 2 * (1/3) * (1/30) = 1/45 and int b^2 = 1/900 on the unit square.
  const double c = 3.0, eps = 0.2, tau = 0.25;
  const DGSpace s(MeshView::uniform(unit_square(), 2, 2), basis(1));
  const TimeSlab slab = make_slab(0, 1.0, 1.0 + tau, zero_field(s), zero_field(s));
  const ExactSolution e = scaled_bubble(c);
  const double no_beta = energy_error_sq_interval(slab, e, eps, 0.0, 10.0, 6);
  CHECK(no_beta == doctest::Approx(tau * eps * c * c / 45.0).epsilon(1e-10));
  const double with_beta = energy_error_sq_interval(slab, e, eps, 2.0, 10.0, 6);
  CHECK(with_beta - no_beta == doctest::Approx(tau * 2.0 * c * c / 900.0).epsilon(1e-10));
}

TEST_CASE("jumps of the discrete field enter the error") {
  const DGSpace s(MeshView::uniform(unit_square(), 2, 2), basis(1));
  const DGField one{s, Eigen::VectorXd::Ones(16)};
  const ExactSolution zero = scaled_bubble(0.0);
  // Eight boundary segments, each eps*gamma/h_E * h_E.
  CHECK(energy_error_sq(one, zero, 0.0, 0.5, 0.0, 10.0, 4) == doctest::Approx(8.0 * 0.5 * 10.0));
  CHECK(energy_norm_sq(one, 0.5, 0.0, 10.0, 4) == doctest::Approx(8.0 * 0.5 * 10.0));
  CHECK(energy_norm_sq(one, 0.5, 1.0, 10.0, 4) == doctest::Approx(8.0 * 0.5 * 10.0 + 1.0));
}

TEST_CASE("interval error interpolates linearly between the end fields") {
  // u_old = 0, u_new = 1 on a single cell, exact = 0: boundary jumps grow like
  // (t - t0)/tau, so the integral is 4 * eps * gamma * tau / 3.
  const DGSpace s(MeshView::uniform(unit_square(), 1, 1), basis(1));
  const TimeSlab slab = make_slab(0, 0.0, 0.6, zero_field(s), DGField{s, Eigen::VectorXd::Ones(4)});
  CHECK(energy_error_sq_interval(slab, scaled_bubble(0.0), 1.0, 0.0, 10.0, 4) ==
        doctest::Approx(4.0 * 10.0 * 0.6 / 3.0));
}

TEST_CASE("three and six time points agree on a smooth slab") {
  const ProblemDefinition pb = example1(1.0);
  BackwardEuler be(pb, 2);
  const MeshView m = MeshView::uniform(unit_square(), 4, 4);
  DGField u = be.initial(m);
  u = be.step(u, m, 0.0, 0.5);
  const DGField v = be.step(u, m, 0.5, 0.5);
  const TimeSlab slab = make_slab(1, 0.5, 1.0, u, v);
  const double e3 = energy_error_sq_interval(slab, *pb.exact, 1.0, 0.0, 10.0, 6, 3);
  const double e6 = energy_error_sq_interval(slab, *pb.exact, 1.0, 0.0, 10.0, 6, 6);
  CHECK(std::abs(e3 - e6) < 0.005 * e6);
}

TEST_CASE("effectivity") {
  const Effectivity two = effectivity(4.0 * 0.09, 0.09);
  CHECK(two.kind == Effectivity::Kind::Value);
  CHECK(two.value == doctest::Approx(2.0));
  CHECK(two.str() == "2");
  CHECK(effectivity(0.0, 0.0).kind == Effectivity::Kind::Exact);
  CHECK(effectivity(0.0, 0.0).str() == "exact");
  CHECK(effectivity(1.0, 0.0).kind == Effectivity::Kind::Undefined);
  CHECK(effectivity(1.0, 0.0).str() == "undefined");
}

TEST_CASE("error report total is the sum of slabs") {
  ErrorReport r;
  r.add(0.5);
  r.add(0.25);
  r.add(0.0);
  CHECK(r.total_sq == 0.75);
  CHECK(r.per_slab.size() == 3);
}
