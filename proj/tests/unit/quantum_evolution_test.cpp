#include <gtest/gtest.h>

#include <chrono>

#include "shpgr/quantum_evolution.hpp"
#include "support.hpp"

using namespace shpgr;
using shpgr::test::kPi;

namespace {

WaveGrid lattice(const Metric2D& m, int n = 64) {
  WaveGrid g = WaveGrid::make(m, n, n, 2 * kPi / n, 2 * kPi / n, 0.0, -kPi);
  fill_gaussian(g, 0.0, 0.5, 1.0);
  return g;
}

}  // namespace

TEST(Lattice, WeightsFollowSqrtG) {
  const Metric2D m = Metric2D::conformal_sine(0.1);
  const WaveGrid g = WaveGrid::make(m, 4, 8, 0.5, 0.25, 0.0, 0.0);
  for (int j = 0; j < 8; ++j) {
    EXPECT_NEAR(g.weights(g.index(2, j)), (1 + 0.1 * std::sin(g.x(j))) * 0.125, 1e-15);
  }
  EXPECT_THROW(WaveGrid::make(m, 0, 8, 0.5, 0.25), UsageError);
}

TEST(Lattice, InnerProductRejectsMismatch) {
  const WaveGrid a = WaveGrid::make(Metric2D::flat(), 4, 4, 1, 1);
  const WaveGrid b = WaveGrid::make(Metric2D::flat(), 4, 5, 1, 1);
  EXPECT_THROW(inner_product(a, b), UsageError);
}

class Hermiticity : public ::testing::TestWithParam<int> {};

TEST_P(Hermiticity, MomentumAndHamiltonianAreSymmetricInWeightedProduct) {
  const Metric2D metrics[] = {Metric2D::flat(), Metric2D::tanh_profile(0.2), Metric2D::conformal_sine(0.1)};
  const Metric2D& m = metrics[GetParam()];
  const WaveGrid g = lattice(m);
  QuantumSpec spec{1.0, m, [](double, double x) { return 0.5 * x * x; }};
  EXPECT_LE(hermiticity_residual(momentum_operator(m, g, 0), g.weights), 1e-10);
  EXPECT_LE(hermiticity_residual(momentum_operator(m, g, 1), g.weights), 1e-10);
  EXPECT_LE(hermiticity_residual(hamiltonian_operator(spec, g), g.weights), 1e-10);
}

TEST_P(Hermiticity, CayleyConservesNormOver1000Steps) {
  const Metric2D metrics[] = {Metric2D::flat(), Metric2D::tanh_profile(0.2), Metric2D::conformal_sine(0.1)};
  const Metric2D& m = metrics[GetParam()];
  const auto t0 = std::chrono::steady_clock::now();
  const WaveGrid g = lattice(m);
  const double n0 = inner_product(g, g).real();
  double drift = 0.0;
  evolve(g, QuantumSpec{1.0, m, {}}, 0.01, 1000, [&](const WaveGrid& w) {
    drift = std::max(drift, std::abs(inner_product(w, w).real() - n0) / n0);
  });
  EXPECT_LE(drift, 1e-10);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60.0);
}

INSTANTIATE_TEST_SUITE_P(Metrics, Hermiticity, ::testing::Values(0, 1, 2));

TEST(Momentum, FlatMatchesCentralDifferenceOfPlaneWave) {
  const int n = 32;
  WaveGrid g = WaveGrid::make(Metric2D::flat(), 1, n, 1.0, 2 * kPi / n);
  for (int j = 0; j < n; ++j) g.psi(j) = std::polar(1.0, 3.0 * g.x(j));
  const Eigen::VectorXcd p = momentum_operator(Metric2D::flat(), g, 1).apply(g.psi);
  const double k_eff = std::sin(3.0 * g.dx) / g.dx;
  EXPECT_LE((p - k_eff * g.psi).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Momentum, TimeDerivativeVanishesOnShortAxis) {
  const WaveGrid g = WaveGrid::make(Metric2D::flat(), 2, 8, 1.0, 0.5);
  EXPECT_EQ(momentum_operator(Metric2D::flat(), g, 0).matrix.nonZeros(), 0);
}

TEST(Evolution, PlaneWaveAcquiresEigenphase) {
  const int n = 32;
  const double mass = 1.0, dtau = 1e-3;
  WaveGrid g = WaveGrid::make(Metric2D::flat(), 1, n, 1.0, 2 * kPi / n);
  for (int j = 0; j < n; ++j) g.psi(j) = std::polar(1.0, 2.0 * g.x(j));
  const double k_eff = std::sin(2.0 * g.dx) / g.dx;
  const double e = k_eff * k_eff / (2 * mass);
  const WaveGrid out = evolve(g, QuantumSpec{mass, Metric2D::flat(), {}}, dtau, 1000);
  const cplx cayley = (1.0 - cplx(0, 0.5 * dtau * e)) / (1.0 + cplx(0, 0.5 * dtau * e));
  const cplx phase = std::pow(cayley, 1000);
  EXPECT_LE((out.psi - phase * g.psi).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(std::arg(phase), std::remainder(-e * 1.0, 2 * kPi), 1e-5);
}

TEST(Evolution, FreeGaussianSpreadsAsExpected) {
  const double sigma = 1.0, mass = 1.0;
  WaveGrid g = WaveGrid::make(Metric2D::flat(), 1, 1600, 1.0, 40.0 / 1600, 0.0, -20.0);
  fill_gaussian(g, 0.0, sigma, 0.0);
  EXPECT_NEAR(position_variance(g), sigma * sigma, 1e-9);
  const WaveGrid out = evolve(g, QuantumSpec{mass, Metric2D::flat(), {}}, 1e-3, 2000);
  const double tau = 2.0;
  const double expect = sigma * sigma * (1 + std::pow(tau / (2 * mass * sigma * sigma), 2));
  EXPECT_NEAR(position_variance(out) / expect, 1.0, 1e-3);
}

TEST(Evolution, ExpectationsTrackMomentum) {
  const int n = 256;
  WaveGrid g = WaveGrid::make(Metric2D::flat(), 1, n, 1.0, 20.0 / n, 0.0, -10.0);
  fill_gaussian(g, 0.0, 1.0, 1.5);
  const DiscreteOperator px = momentum_operator(Metric2D::flat(), g, 1);
  const QuantumSpec spec{1.0, Metric2D::flat(), {}};
  const DiscreteOperator k = hamiltonian_operator(spec, g);
  const Expectations e0 = expectations(g, px, k);
  const Expectations e1 = expectations(evolve(g, spec, 0.01, 100), px, k);
  EXPECT_NEAR(e1.p, e0.p, 1e-10);
  EXPECT_NEAR(e1.k, e0.k, 1e-10);
  EXPECT_NEAR(e1.x - e0.x, e0.p * 1.0, 0.02);
}
