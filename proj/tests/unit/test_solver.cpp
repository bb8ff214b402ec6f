#include <doctest.h>

#include "dgcd/linear_solver.hpp"
#include "dgcd/time_stepper.hpp"
#include "helpers.hpp"

using namespace dgcd;
using namespace testing;

namespace {

// Gaussian elimination with partial pivoting.
Eigen::VectorXd dense_solve(Eigen::MatrixXd A, Eigen::VectorXd b) {
  const Eigen::Index n = A.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    A.row(k).swap(A.row(piv));
    std::swap(b(k), b(piv));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double l = A(i, k) / A(k, k);
      A.row(i) -= l * A.row(k);
      b(i) -= l * b(k);
    }
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = b(i);
    for (Eigen::Index j = i + 1; j < n; ++j) s -= A(i, j) * x(j);
    x(i) = s / A(i, i);
  }
  return x;
}

SolverConfig with(PreconditionerKind k, double tol = 1e-12) {
  SolverConfig c;
  c.preconditioner = k;
  c.tolerance = tol;
  return c;
}

// M/tau + A for Example 1 on a uniform n x n mesh.
SparseMatrixCSR example1_system(int n, int p, double eps, double tau, DGSpace* out = nullptr) {
  const DGSpace s(MeshView::uniform(unit_square(), n, n), std::make_shared<TensorBasis>(p));
  SparseMatrixCSR A = assemble_spatial_operator(s, example1(eps), tau, 10.0, p + 2);
  A.add_scaled(1.0 / tau, assemble_mass(s, p + 2));
  if (out) *out = s;
  return A;
}

}  // namespace

TEST_CASE("identity system converges immediately") {
  const SparseMatrixCSR I = SparseMatrixCSR::from_dense(Eigen::MatrixXd::Identity(5, 5));
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
  Eigen::VectorXd x;
  const SolverStats st = gmres_solve(I, b, x, with(PreconditionerKind::None));
  CHECK(st.converged);
  CHECK(st.iterations <= 1);
  CHECK((x - b).norm() < 1e-14);
}

TEST_CASE("upper triangular 2x2 system") {
  Eigen::MatrixXd A(2, 2);
  A << 2, 1, 0, 2;
  Eigen::VectorXd x;
  gmres_solve(SparseMatrixCSR::from_dense(A), Eigen::Vector2d(3, 2), x, with(PreconditionerKind::None));
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(1.0));
}

TEST_CASE("zero right-hand side gives zero") {
  const SparseMatrixCSR A = example1_system(2, 1, 1.0, 1.0);
  Eigen::VectorXd x;
  gmres_solve(A, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(A.rows())), x);
  CHECK(x.norm() == 0.0);
}

TEST_CASE("Example 1 system on 2x2, p=1, tau=1 matches dense elimination") {
  DGSpace s(MeshView::uniform(unit_square(), 1, 1), std::make_shared<TensorBasis>(1));
  const SparseMatrixCSR A = example1_system(2, 1, 1.0, 1.0, &s);
  REQUIRE(A.rows() == 16);
  const Eigen::VectorXd b = assemble_load(s, example1(1.0), 1.0, 3);
  const Eigen::VectorXd ref = dense_solve(A.to_dense(), b);
  for (auto k : {PreconditionerKind::None, PreconditionerKind::BlockJacobi, PreconditionerKind::BlockILU0}) {
    Eigen::VectorXd x;
    gmres_solve(A, b, x, with(k));
    CHECK((x - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("solutions scale linearly down to the edge of the double range") {
  const SparseMatrixCSR A = example1_system(4, 2, 1.0, 0.07);
  std::mt19937 rng(17);
  const Eigen::VectorXd b = random_vector(rng, A.rows());
  Eigen::VectorXd ref;
  gmres_solve(A, b, ref, with(PreconditionerKind::BlockILU0, 1e-11));
  for (double s : {1e-150, 1e-200, 1e-300}) {
    Eigen::VectorXd x;
    gmres_solve(A, b * s, x, with(PreconditionerKind::BlockILU0, 1e-11));
    CHECK((x / s - ref).norm() < 1e-9 * ref.norm());
  }
}

TEST_CASE("preconditioned and plain GMRES agree to solver tolerance") {
  const SparseMatrixCSR A = example1_system(6, 2, 1e-2, 0.1);
  std::mt19937 rng(31);
  const Eigen::VectorXd b = random_vector(rng, A.rows());
  Eigen::VectorXd x0, x1, x2;
  gmres_solve(A, b, x0, with(PreconditionerKind::None, 1e-11));
  gmres_solve(A, b, x1, with(PreconditionerKind::BlockJacobi, 1e-11));
  gmres_solve(A, b, x2, with(PreconditionerKind::BlockILU0, 1e-11));
  const double scale = x0.norm();
  CHECK((x0 - x1).norm() < 1e-8 * scale);
  CHECK((x0 - x2).norm() < 1e-8 * scale);
  CHECK((b - A * x1).norm() <= 1e-11 * b.norm() * (1 + 1e-6));
}

TEST_CASE("solving with the mass matrix is exact") {
  std::mt19937 rng(32);
  const DGSpace s(random_mesh(rng, unit_square(), 2, 2, 2), std::make_shared<TensorBasis>(3));
  const SparseMatrixCSR M = assemble_mass(s, 5);
  const Eigen::VectorXd y = random_vector(rng, s.num_dofs());
  Eigen::VectorXd x;
  const SolverStats st = gmres_solve(M, M * y, x);
  CHECK((x - y).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(st.iterations <= 1);
}

TEST_CASE("block ILU(0) is an exact factorisation on a chain of cells") {
  // A row of cells couples each block to its two neighbours only: no fill-in.
  const DGSpace s(MeshView::uniform(unit_square(), 6, 1), std::make_shared<TensorBasis>(2));
  SparseMatrixCSR A = assemble_spatial_operator(s, example1(0.1), 1.0, 10.0, 4);
  A.add_scaled(10.0, assemble_mass(s, 4));
  std::mt19937 rng(33);
  const Eigen::VectorXd b = random_vector(rng, A.rows());
  const BlockPreconditioner P(A, PreconditionerKind::BlockILU0);
  Eigen::VectorXd z;
  P.apply(b, z);
  CHECK((A * z - b).norm() < 1e-12 * b.norm());
  Eigen::VectorXd x;
  CHECK(gmres_solve(A, b, x, with(PreconditionerKind::BlockILU0), &P).iterations <= 1);
}

TEST_CASE("small restart still converges") {
  const SparseMatrixCSR A = example1_system(4, 1, 1.0, 0.5);
  std::mt19937 rng(34);
  const Eigen::VectorXd b = random_vector(rng, A.rows());
  SolverConfig c = with(PreconditionerKind::BlockJacobi, 1e-10);
  c.restart = 3;
  Eigen::VectorXd x;
  const SolverStats st = gmres_solve(A, b, x, c);
  CHECK(st.converged);
  CHECK((b - A * x).norm() <= 1e-10 * b.norm() * (1 + 1e-6));
}

TEST_CASE("non-convergence raises an error carrying the best iterate") {
  const SparseMatrixCSR A = example1_system(8, 2, 1e-2, 1.0);
  std::mt19937 rng(35);
  const Eigen::VectorXd b = random_vector(rng, A.rows());
  SolverConfig c = with(PreconditionerKind::None, 1e-12);
  c.max_iterations = 3;
  Eigen::VectorXd x;
  try {
    gmres_solve(A, b, x, c);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.best_iterate().size() == b.size());
    CHECK(e.relative_residual() > 1e-12);
    CHECK(e.relative_residual() < 1.0);
    CHECK((b - A * e.best_iterate()).norm() / b.norm() == doctest::Approx(e.relative_residual()).epsilon(1e-6));
  }
}

TEST_CASE("preconditioner names") {
  CHECK(parse_preconditioner("none") == PreconditionerKind::None);
  CHECK(parse_preconditioner("block_jacobi") == PreconditionerKind::BlockJacobi);
  CHECK(parse_preconditioner("block_ilu0") == PreconditionerKind::BlockILU0);
  CHECK(to_string(PreconditionerKind::BlockILU0) == "block_ilu0");
  CHECK_THROWS(parse_preconditioner("amg"));
}

TEST_CASE("sparse matrix basics") {
  Eigen::MatrixXd D(3, 3);
  D << 1, 0, 2, 0, 3, 0, 4, 0, 5;
  const SparseMatrixCSR A = SparseMatrixCSR::from_dense(D);
  CHECK(A.nonzeros() == 5);
  CHECK(A.entry(2, 0) == 4.0);
  CHECK(A.entry(1, 0) == 0.0);
  CHECK((A.to_dense() - D).norm() == 0.0);
  const Eigen::Vector3d x(1, 2, 3);
  CHECK((A * x - D * x).norm() == 0.0);
}
