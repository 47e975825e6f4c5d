#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "mheat/discrete_ops.hpp"
#include "mheat/error.hpp"
#include "mheat/physics.hpp"
#include "mheat/rothe.hpp"
#include "mheat/solver.hpp"
#include "oracles.hpp"

using namespace mheat;
using mheat::oracle::dense;
using mheat::oracle::gauss_seidel_oracle;
using mheat::oracle::to_eigen;

namespace {

Vector random_vector(std::mt19937_64& rng, int n, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  Vector v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double max_diff(const Vector& a, const Eigen::VectorXd& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_diff(const Vector& a, const Vector& b) { return max_diff(a, to_eigen(b)); }

SparseMatrix laplacian_plus_mass(const StaggeredGrid& g) {
  return assemble(g, "node_laplacian") + SparseMatrix::diagonal_matrix(g.node_mass());
}

ModelConfig base_model() {
  ModelConfig m;
  m.tau = 0.05;
  m.t_final = 0.5;
  return m;
}

}  // namespace

TEST(Solver, ScaledIdentityOneIteration) {
  const SparseMatrix A = SparseMatrix::identity(10).scaled(2.5);
  std::mt19937_64 rng(1);
  const Vector b = random_vector(rng, 10);
  const SolveResult r = solve_spd(A, b, 1e-12, 100);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 1);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(r.x[i], b[i] / 2.5, 1e-15);
}

TEST(Solver, SpdMatchesDense) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  const SparseMatrix A = laplacian_plus_mass(g);
  std::mt19937_64 rng(2);
  const Vector b = random_vector(rng, A.rows());
  const SolveResult r = solve_spd(A, b, 1e-13, 1000);
  ASSERT_TRUE(r.report.converged);
  const Eigen::VectorXd x = dense(A).ldlt().solve(to_eigen(b));
  EXPECT_LT(max_diff(r.x, x), 1e-10 * x.cwiseAbs().maxCoeff());
}

TEST(Solver, SingularReportsNonConvergence) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  const SparseMatrix A = assemble(g, "node_laplacian");
  Vector b(A.rows(), 0.0);
  b[0] = 1.0;
  SolveResult r;
  ASSERT_NO_THROW(r = solve_spd(A, b, 1e-12, 500));
  EXPECT_FALSE(r.report.converged);
}

TEST(Solver, NanThrows) {
  const SparseMatrix A = SparseMatrix::identity(3);
  const Vector b{1.0, std::numeric_limits<double>::quiet_NaN(), 0.0};
  EXPECT_THROW(solve_spd(A, b, 1e-12, 10), Error);
}

TEST(Solver, ZeroRhs) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  const SparseMatrix A = laplacian_plus_mass(g);
  for (const SolveResult& r : {solve_spd(A, Vector(A.rows(), 0.0), 1e-10, 100),
                               solve_nonsymmetric(A, Vector(A.rows(), 0.0), 1e-10, 100)}) {
    EXPECT_TRUE(r.report.converged);
    EXPECT_EQ(r.report.iterations, 0);
    for (double v : r.x) EXPECT_EQ(v, 0.0);
  }
}

TEST(Solver, BiCgStabAgreesWithCg) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  const SparseMatrix A = laplacian_plus_mass(g);
  std::mt19937_64 rng(3);
  const Vector b = random_vector(rng, A.rows());
  const SolveResult a = solve_spd(A, b, 1e-13, 1000);
  const SolveResult c = solve_nonsymmetric(A, b, 1e-13, 1000);
  EXPECT_LT(max_diff(a.x, c.x), 1e-10);
}

TEST(Solver, MagneticMatrixWithShearMatchesDense) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  ModelConfig m = base_model();
  m.U_preset = Preset::parse("shear rate=2");
  const Problem pb(g, m);
  std::mt19937_64 rng(4);
  const NodeField xi = random_vector(rng, g.node_count(), 0.5);
  const NodeField s(g.node_count(), 0.3);
  const SparseMatrix full = pb.magnetic_matrix(pb.face_lambda(xi), s);
  const SparseMatrix A = full.submatrix(pb.free_edges(), pb.free_edges());
  const Vector b = random_vector(rng, A.rows());
  const SolveResult r = solve_nonsymmetric(A, b, 1e-13, 5000);
  ASSERT_TRUE(r.report.converged);
  const Eigen::VectorXd x = dense(A).partialPivLu().solve(to_eigen(b));
  EXPECT_LT(max_diff(r.x, x), 1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff()));
}

TEST(Solver, Deterministic) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  const SparseMatrix A = laplacian_plus_mass(g);
  std::mt19937_64 rng(5);
  const Vector b = random_vector(rng, A.rows());
  EXPECT_EQ(solve_spd(A, b, 1e-12, 1000).x, solve_spd(A, b, 1e-12, 1000).x);
  EXPECT_EQ(solve_nonsymmetric(A, b, 1e-12, 1000).x, solve_nonsymmetric(A, b, 1e-12, 1000).x);
}

TEST(Newton, ZeroRhsZeroGuess) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  const Problem pb(g, base_model());
  const int n = static_cast<int>(pb.free_nodes().size());
  const SolveResult r = solve_heat_step_newton(pb.heat_system(), Vector(n, 0.0), Vector(n, 0.0), 1e-10, 50);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.iterations, 1);
  for (double v : r.x) EXPECT_EQ(v, 0.0);
}

TEST(Newton, LinearBoundaryMatchesCg) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  ModelConfig m = base_model();
  m.zeta = 0.0;
  const Problem pb(g, m);
  const HeatSystem& sys = pb.heat_system();
  std::mt19937_64 rng(6);
  const Vector rhs = random_vector(rng, sys.A.rows());
  const SolveResult nr = solve_heat_step_newton(sys, rhs, Vector(rhs.size(), 0.0), 1e-12, 50);
  ASSERT_TRUE(nr.report.converged);
  EXPECT_LE(nr.report.iterations, 2);
  std::vector<Triplet> t = sys.A.triplets();
  for (std::size_t i = 0; i < rhs.size(); ++i) t.push_back({int(i), int(i), sys.omega * sys.surface_weight[i]});
  const SparseMatrix J(sys.A.rows(), sys.A.cols(), t);
  const SolveResult cg = solve_spd(J, rhs, 1e-14, 1000);
  EXPECT_LT(max_diff(nr.x, cg.x), 1e-12);
}

TEST(Newton, NonlinearMatchesGaussSeidelOracle) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  ModelConfig m = base_model();
  m.theta0_preset = Preset::parse("linear_in_z base=1 slope=0.5");
  const Problem pb(g, m);
  const HeatSystem& sys = pb.heat_system();
  std::mt19937_64 rng(7);
  const Vector rhs = random_vector(rng, sys.A.rows(), 5.0);
  const SolveResult r = solve_heat_step_newton(sys, rhs, Vector(rhs.size(), 0.0), 1e-10, 50);
  ASSERT_TRUE(r.report.converged);
  EXPECT_LE(r.report.iterations, 15);
  EXPECT_LT(heat_merit(sys, heat_residual(sys, r.x, rhs)), 1e-10);
  const Vector oracle = gauss_seidel_oracle(sys, rhs);
  EXPECT_LT(max_diff(r.x, oracle), 1e-8);
}

TEST(Newton, IndependentOfStartingGuess) {
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  const Problem pb(g, base_model());
  const HeatSystem& sys = pb.heat_system();
  std::mt19937_64 rng(8);
  const Vector rhs = random_vector(rng, sys.A.rows(), 3.0);
  const double tol = 1e-11;
  const SolveResult a = solve_heat_step_newton(sys, rhs, Vector(rhs.size(), 0.0), tol, 100);
  const SolveResult b = solve_heat_step_newton(sys, rhs, random_vector(rng, sys.A.rows(), 4.0), tol, 100);
  ASSERT_TRUE(a.report.converged && b.report.converged);
  EXPECT_LT(max_diff(a.x, b.x), 1e-9);
}
