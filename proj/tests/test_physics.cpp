#include <gtest/gtest.h>

#include <random>

#include "mheat/discrete_ops.hpp"
#include "mheat/dual.hpp"
#include "mheat/error.hpp"
#include "mheat/physics.hpp"
#include "mheat/presets.hpp"

using namespace mheat;

namespace {

Vec3 random_vec(std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {amp * u(rng), amp * u(rng), amp * u(rng)};
}

double log_amp(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(1e-2), std::log(1e2));
  return std::exp(u(rng));
}

}  // namespace

TEST(Physics, QuenchExamples) {
  EXPECT_EQ(quench(Vec3{0, 0, 0}, 1.0, 1.0), (Vec3{0, 0, 0}));
  const Vec3 q = quench(Vec3{1, 0, 0}, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(q[0], 0.5);
  EXPECT_EQ(q[1], 0.0);
  EXPECT_NEAR(norm(quench(Vec3{0.5, 0, 0}, 1.0, 4.0)), 0.25, 1e-15);
}

TEST(Physics, QuenchSupBound) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100000; ++i) {
    const double gamma = log_amp(rng);
    const double f = u(rng);
    const Vec3 v = random_vec(rng, log_amp(rng));
    ASSERT_LE(norm(quench(v, f, gamma)), std::abs(f) / (2.0 * std::sqrt(gamma)) * (1.0 + 1e-14));
  }
}

TEST(Physics, QuenchLipschitzGap) {
  auto [l0, r0] = quench_lipschitz_gap({1, 2, 3}, {1, 2, 3}, 1.0);
  EXPECT_EQ(l0, 0.0);
  EXPECT_EQ(r0, 0.0);
  auto [l, r] = quench_lipschitz_gap({1, 0, 0}, {-1, 0, 0}, 1.0);
  EXPECT_DOUBLE_EQ(l, 1.0);
  EXPECT_DOUBLE_EQ(r, 4.5);
}

TEST(Physics, CutoffExamples) {
  EXPECT_EQ(cutoff(0.0, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(cutoff(3.0, 0.5), 1.2);
  EXPECT_DOUBLE_EQ(cutoff(1.0 / 0.05, 0.05), 1.0 / (2.0 * 0.05));
}

TEST(Physics, CutoffProperties) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100000; ++i) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double d = u(rng) * log_amp(rng) * 100.0;
    const double eps = std::exp(std::uniform_real_distribution<double>(std::log(1e-4), 0.0)(rng));
    const double c = cutoff(d, eps);
    ASSERT_LE(std::abs(c), 1.0 / eps);
    ASSERT_LE(std::abs(c - d), eps * d * d * (1.0 + 1e-14));
  }
  // Linear in ε: the residual halves with ε up to O(ε²).
  const double d = 2.0;
  const double r1 = d - cutoff(d, 1e-3);
  const double r2 = d - cutoff(d, 5e-4);
  EXPECT_NEAR(r1 / r2, 2.0, 1e-2);
}

TEST(Physics, PsiExamples) {
  EXPECT_EQ(psi(0.0, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(psi(2.0, 1.0, 2.0), 20.0);
  const double a = 1.0, b = -1.0;
  EXPECT_DOUBLE_EQ((psi(a, 8.0, 0.0) - psi(b, 8.0, 0.0)) * (a - b), 32.0);
  EXPECT_DOUBLE_EQ(8.0 / 8.0 * std::pow(std::abs(a - b), 5), 32.0);
  EXPECT_EQ(psi_jump(0.0, 1.3, 1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(psi_jump(1.0, 1.0, 1.0, 0.0), 15.0);
}

TEST(Physics, PsiJumpMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double zeta = 1.0, omega = 1.0;
  for (int i = 0; i < 100000; ++i) {
    const double a = u(rng) * log_amp(rng);
    const double b = u(rng) * log_amp(rng);
    const double th = 2.0 * u(rng) * log_amp(rng);
    const double lhs = (psi_jump(a, th, zeta, omega) - psi_jump(b, th, zeta, omega)) * (a - b);
    const double d = std::abs(a - b);
    const double rhs = zeta / 8.0 * std::pow(d, 5) + omega * d * d;
    ASSERT_GE(lhs - rhs, -1e-12 * std::max(std::abs(lhs), 1.0)) << a << ' ' << b << ' ' << th;
  }
  // Sign-symmetric sharpness case with θ₀ = 0.
  const double a = 0.7;
  const double lhs = (psi_jump(a, 0.0, zeta, 0.0) - psi_jump(-a, 0.0, zeta, 0.0)) * (2 * a);
  EXPECT_NEAR(lhs / (zeta / 8.0 * std::pow(2 * a, 5)), 1.0, 1e-12);
}

TEST(Physics, LambdaAndQBounds) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double lip_l = 0.0, lip_q = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double s = u(rng) * log_amp(rng);
    const double t = s + u(rng) * 1e-3;
    const double l = lambda_of(s, 1.0, 0.5);
    const double q = q_of(s, 1.0, 0.5);
    ASSERT_GE(l, 1.0);
    ASSERT_LE(l, 1.5);
    ASSERT_GE(q, 1.0);
    ASSERT_LE(q, 1.5);
    if (t != s) {
      lip_l = std::max(lip_l, std::abs(lambda_of(t, 1.0, 0.5) - l) / std::abs(t - s));
      lip_q = std::max(lip_q, std::abs(q_of(t, 1.0, 0.5) - q) / std::abs(t - s));
    }
  }
  const double bound = rational_lipschitz(0.5);
  EXPECT_LE(lip_l, bound * (1.0 + 1e-6));
  EXPECT_LE(lip_q, bound * (1.0 + 1e-6));
  EXPECT_GT(lip_l, 0.9 * bound);
}

TEST(Physics, DualDerivatives) {
  using D = Dual<double>;
  using DD = Dual<D>;
  const D x = variable(0.3);
  const D y = sin(x) * exp(x) / (1.0 + x * x);
  const double h = 1e-6;
  auto f = [](double s) { return std::sin(s) * std::exp(s) / (1.0 + s * s); };
  EXPECT_NEAR(y.d, (f(0.3 + h) - f(0.3 - h)) / (2 * h), 1e-8);
  const DD z(D(0.3, 1.0), D(1.0, 0.0));
  const DD w = z * z * z;
  EXPECT_NEAR(w.d.d, 6.0 * 0.3, 1e-14);
}

TEST(Physics, JouleDensityExamples) {
  const auto g = build_grid({1, 1, 1}, {2, 2, 2}, {BoxFace::ZMinus});
  ModelConfig cfg;
  cfg.R_alpha = 0.0;
  const std::vector<Vec3> U0(g.node_count(), Vec3{0, 0, 0});
  const NodeField f0(g.node_count(), 0.0);
  const NodeField K0 = joule_density(g, cfg, EdgeField(g.edge_count(), 0.0), U0, f0);
  for (double k : K0) EXPECT_EQ(k, 0.0);

  EdgeField B(g.edge_count(), 0.0);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (g.entity(EntityKind::Edge, e).dir == 1) B[e] = g.entity_center(EntityKind::Edge, e)[0];
  }
  const NodeField K = joule_density(g, cfg, B, U0, f0);
  EXPECT_NEAR(K[g.node_index(1, 1, 1)], 1.0, 1e-14);
  for (double k : K) EXPECT_NEAR(k, 1.0, 1e-14);
}

TEST(Physics, JouleDensityNonnegativeWithoutCoupling) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  ModelConfig cfg;
  EdgeField B(g.edge_count());
  for (double& b : B) b = u(rng);
  const NodeField K =
      joule_density(g, cfg, B, std::vector<Vec3>(g.node_count(), Vec3{0, 0, 0}), NodeField(g.node_count(), 0.0));
  for (double k : K) EXPECT_GE(k, 0.0);
}

TEST(Presets, Values) {
  const Vec3 L{1, 1, 1};
  const Preset rot = Preset::parse("solid_rotation rate=2");
  const Vec3 c = U_value(rot, Vec3{0.5, 0.5, 0.3}, L);
  EXPECT_EQ(c, (Vec3{0, 0, 0}));
  EXPECT_EQ(U_value(rot, Vec3{1.0, 0.5, 0.0}, L), (Vec3{0, 1.0, 0}));
  EXPECT_DOUBLE_EQ(f_value(Preset::parse("gaussian_blob amplitude=2"), Vec3{0.5, 0.5, 0.5}, 0.0, L), 2.0);
  EXPECT_DOUBLE_EQ(theta0_value(Preset::parse("linear_in_z base=1 slope=0.5"), Vec3{0, 0, 1.0}, L), 1.5);
  const auto g = build_grid({1, 1, 1}, {3, 3, 3}, {BoxFace::ZMinus});
  for (double b : sample_B0(g, Preset::parse("zero"), MagneticBc::Essential)) EXPECT_EQ(b, 0.0);
}

TEST(Presets, Validation) {
  EXPECT_THROW(validate_preset(PresetKind::F, Preset::parse("no_such_profile")), Error);
  EXPECT_THROW(validate_preset(PresetKind::U, Preset::parse("shear speed=2")), Error);
  EXPECT_NO_THROW(validate_preset(PresetKind::B0, Preset::parse("constant_tangential bx=1")));
}
