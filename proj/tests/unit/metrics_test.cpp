#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "polent/error.hpp"
#include "polent/metrics.hpp"

namespace polent {
namespace {

using testing::cd;

PolarizationDensityMatrix state(const Matrix4cd& m) { return PolarizationDensityMatrix(m); }

Matrix4cd pure(const Eigen::Vector4cd& psi) {
  const Eigen::Vector4cd n = psi.normalized();
  return n * n.adjoint();
}

TEST(Purity, Examples) {
  EXPECT_NEAR(purity(state(testing::two_term_state(0.5, 0.5, 0.5))), 1.0, 1e-12);
  EXPECT_NEAR(purity(state(Matrix4cd::Identity() / 4.0)), 0.25, 1e-12);
}

TEST(Purity, TwoTermIdentity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const cd d = std::polar(u(rng) * std::sqrt(a * (1 - a)), 6.0 * u(rng));
    EXPECT_NEAR(purity(state(testing::two_term_state(a, 1 - a, d))),
                a * a + (1 - a) * (1 - a) + 2 * std::norm(d), 1e-12);
  }
}

TEST(Concurrence, Examples) {
  EXPECT_NEAR(concurrence(state(testing::two_term_state(0.5, 0.5, 0.5))), 1.0, 1e-9);
  EXPECT_NEAR(concurrence(state(Matrix4cd::Identity() / 4.0)), 0.0, 1e-12);
  const cd d(0.243, 0.259);
  EXPECT_NEAR(concurrence(state(testing::two_term_state(0.52 / 0.95, 0.43 / 0.95, d))), 2 * std::abs(d), 1e-9);
  EXPECT_NEAR(2 * std::abs(d), 0.710, 0.001);
}

TEST(Concurrence, CoherenceIdentityAgainstSpinFlipOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const cd d = std::polar(u(rng) * std::sqrt(a * (1 - a)), 6.0 * u(rng));
    const Matrix4cd rho = testing::two_term_state(a, 1 - a, d);
    const double c = concurrence(state(rho));
    EXPECT_NEAR(c, 2 * std::abs(d), 1e-7);
    EXPECT_NEAR(c, testing::reference_concurrence(rho), 1e-7);
  }
}

TEST(Concurrence, MatchesOracleOnGeneralStates) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Matrix4cd rho = testing::random_density_matrix(rng, 2 + i % 3);
    EXPECT_NEAR(concurrence(state(rho)), testing::reference_concurrence(rho), 1e-7);
  }
}

TEST(Concurrence, VanishesOnProductStates) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    Eigen::Matrix2cd a = testing::random_qubit_state(rng), b = testing::random_qubit_state(rng);
    Matrix4cd rho = kron(a, b);
    EXPECT_LT(concurrence(state(hermitian_part(rho))), 1e-10);
  }
}

TEST(Fidelity, SelfAndOrthogonal) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto rho = state(testing::random_density_matrix(rng));
    EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-10);
  }
  const auto a = state(pure({0, 1, 1, 0}));
  const auto b = state(pure({0, 1, -1, 0}));
  EXPECT_NEAR(fidelity(a, b), 0.0, 1e-6);
}

TEST(Fidelity, SymmetricAndUnitarilyInvariant) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const Matrix4cd a = testing::random_density_matrix(rng);
    const Matrix4cd b = testing::random_density_matrix(rng);
    const Matrix4cd u = testing::random_unitary(rng);
    const double f = fidelity(state(a), state(b));
    EXPECT_NEAR(f, fidelity(state(b), state(a)), 1e-10);
    const auto ua = state(hermitian_part(u * a * u.adjoint()));
    const auto ub = state(hermitian_part(u * b * u.adjoint()));
    EXPECT_NEAR(f, fidelity(ua, ub), 1e-10);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(Fidelity, SymmetricOnRankDeficientStates) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const Matrix4cd a = testing::random_density_matrix(rng, 1 + i % 3);
    const Matrix4cd b = testing::random_density_matrix(rng, 1 + (i / 3) % 4);
    const Matrix4cd u = testing::random_unitary(rng);
    const double f = fidelity(state(a), state(b));
    EXPECT_NEAR(f, fidelity(state(b), state(a)), 1e-10);
    EXPECT_NEAR(f, fidelity(state(hermitian_part(u * a * u.adjoint())), state(hermitian_part(u * b * u.adjoint()))),
                1e-10);
  }
  // pure against anything is the square root of the overlap
  const Eigen::Vector4cd psi = Eigen::Vector4cd(1.0, cd(0, 2), -1.0, 0.5).normalized();
  const Matrix4cd sigma = testing::random_density_matrix(rng);
  EXPECT_NEAR(fidelity(state(psi * psi.adjoint()), state(sigma)),
              std::sqrt((psi.adjoint() * sigma * psi)(0, 0).real()), 1e-12);
}

TEST(Fidelity, NonPsdInputIsInvalidState) {
  Matrix4cd m = Matrix4cd::Zero();
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  const auto bad = PolarizationDensityMatrix::unchecked(m);
  try {
    fidelity(bad, state(Matrix4cd::Identity() / 4.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidState);
  }
}

TEST(ExtractD, Examples) {
  const auto a = extract_d(state(pure({0, 1, 1, 0})));
  EXPECT_NEAR(std::abs(a.d - cd(0.5, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(a.phase, 0.0, 1e-15);
  const auto b = extract_d(state(pure({0, 1, cd(0, 1), 0})));
  EXPECT_NEAR(std::abs(b.d - cd(0.0, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(b.phase, std::numbers::pi / 2, 1e-15);
  const auto c = extract_d(state(testing::two_term_state(0.52 / 0.95, 0.43 / 0.95, {0.097, 0.242})));
  EXPECT_NEAR(c.phase, 1.19, 0.005);
}

TEST(Car, Examples) {
  CountTable t;
  t.at(Basis::H, Basis::V).coincidences = 50;
  t.at(Basis::H, Basis::V).accidentals = 50.0;
  EXPECT_DOUBLE_EQ(car(t), 1.0);
  t.at(Basis::V, Basis::H).coincidences = 480;
  t.at(Basis::V, Basis::H).accidentals = 870.0 * 870.0 * 120.0 / 1.9e6;
  EXPECT_NEAR(car(t), 10.04, 0.01);
  CountTable zero;
  EXPECT_THROW(car(zero), Error);
}

TEST(ComputeMetrics, RangesAndOptionalFields) {
  std::mt19937_64 rng(7);
  const auto rho = state(testing::random_density_matrix(rng));
  const auto m = compute_metrics(rho);
  EXPECT_GE(m.purity, 0.25 - 1e-12);
  EXPECT_LE(m.purity, 1.0 + 1e-12);
  EXPECT_GE(m.concurrence, 0.0);
  EXPECT_LE(m.concurrence, 1.0);
  EXPECT_FALSE(m.fidelity_vs_reference);
  EXPECT_FALSE(m.car);
  const auto with_ref = compute_metrics(rho, &rho);
  EXPECT_NEAR(*with_ref.fidelity_vs_reference, 1.0, 1e-10);
}

}  // namespace
}  // namespace polent
