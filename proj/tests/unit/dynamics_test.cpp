#include <gtest/gtest.h>

#include <sstream>

#include "shpgr/dynamics.hpp"
#include "support.hpp"

using namespace shpgr;
using shpgr::test::kPi;

namespace {

HamiltonianSpec harmonic_spec(double kappa = 1.0, double mass = 1.0) {
  return {mass, MetricField::minkowski(), PotentialField::harmonic(kappa, 1)};
}

double harmonic_error(const HamiltonianSpec& spec, const PhaseState& s0, double dtau, int steps) {
  const double omega = std::sqrt(1.0 / spec.mass);
  const Trajectory t = integrate_trajectory(spec, s0, dtau, steps);
  double e = 0.0;
  const double x0 = s0.x.coords(1), v0 = s0.momentum(1) / spec.mass;
  for (const PhaseState& s : t.states) {
    const double exact = x0 * std::cos(omega * s.tau) + v0 / omega * std::sin(omega * s.tau);
    e = std::max(e, std::abs(s.x.coords(1) - exact));
  }
  return e;
}

}  // namespace

TEST(Hamiltonian, FreeParticleValueIsMinusHalfMass) {
  HamiltonianSpec spec{2.0, MetricField::minkowski(), PotentialField::zero()};
  const Vec4 u(std::cosh(0.4), std::sinh(0.4), 0, 0);
  const PhaseState s = state_from_velocity(spec, {Vec4::Zero(), Chart::cartesian}, u);
  EXPECT_NEAR(hamiltonian_value(spec, s), -1.0, 1e-14);
}

TEST(Hamiltonian, FreeMotionIsStraight) {
  HamiltonianSpec spec{1.0, MetricField::minkowski(), PotentialField::zero()};
  const Vec4 u(1.25, 0.75, 0, 0);
  const PhaseState s0 = state_from_velocity(spec, {Vec4::Zero(), Chart::cartesian}, u);
  const Trajectory t = integrate_trajectory(spec, s0, 0.1, 50);
  const Vec4 end = t.states.back().x.coords;
  EXPECT_LE((end - 5.0 * u).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Integrator, HarmonicOracleIsFourthOrder) {
  const HamiltonianSpec spec = harmonic_spec();
  const PhaseState s0 = state_from_velocity(spec, {Vec4(0, 1, 0, 0), Chart::cartesian}, Vec4(1.5, 0.3, 0, 0));
  const double e1 = harmonic_error(spec, s0, 2 * kPi / 400, 400);
  const double e2 = harmonic_error(spec, s0, 2 * kPi / 800, 800);
  const double e3 = harmonic_error(spec, s0, 2 * kPi / 1600, 1600);
  EXPECT_GE(e1 / e2, 14.0);
  EXPECT_GE(e2 / e3, 14.0);
}

TEST(Integrator, ConservesHamiltonianOverPeriod) {
  const HamiltonianSpec spec = harmonic_spec();
  const PhaseState s0 = state_from_velocity(spec, {Vec4(0, 1, 0, 0), Chart::cartesian}, Vec4(1.5, 0, 0.2, 0));
  const Trajectory t = integrate_trajectory(spec, s0, 2 * kPi / 1000, 1000);
  const double k0 = hamiltonian_value(spec, s0);
  for (const PhaseState& s : t.states) EXPECT_NEAR(hamiltonian_value(spec, s), k0, 1e-8);
}

TEST(Integrator, SchwarzschildCircularOrbitHoldsRadius) {
  const double mass = 1.0, r = 6.0;
  HamiltonianSpec spec{1.0, MetricField::schwarzschild(mass), PotentialField::zero()};
  const double ut = 1.0 / std::sqrt(1.0 - 3.0 * mass / r);
  const Vec4 u(ut, 0, 0, ut * std::sqrt(mass / (r * r * r)));
  const PhaseState s0 = state_from_velocity(spec, {Vec4(0, r, kPi / 2, 0), Chart::spherical}, u);
  const Trajectory t = integrate_trajectory(spec, s0, 0.1, 10000);
  ASSERT_FALSE(t.exited_domain);
  double drift = 0.0;
  for (const PhaseState& s : t.states) drift = std::max(drift, std::abs(s.x.coords(1) - r));
  EXPECT_LE(drift, 1e-6);
  EXPECT_NEAR(hamiltonian_value(spec, t.states.back()), -0.5, 1e-8);
}

TEST(Integrator, RadialInfallExitsDomain) {
  HamiltonianSpec spec{1.0, MetricField::schwarzschild(1.0), PotentialField::zero()};
  const double r = 4.0;
  const Vec4 u(1.0 / std::sqrt(1.0 - 2.0 / r), 0, 0, 0);
  const PhaseState s0 = state_from_velocity(spec, {Vec4(0, r, kPi / 2, 0), Chart::spherical}, u);
  const Trajectory t = integrate_trajectory(spec, s0, 0.01, 100000);
  EXPECT_TRUE(t.exited_domain);
  EXPECT_LT(t.states.size(), 100001u);
  for (const PhaseState& s : t.states) EXPECT_GT(s.x.coords(1), 2.0);
}

TEST(Integrator, RejectsBadArguments) {
  const HamiltonianSpec spec = harmonic_spec();
  const PhaseState s0 = state_from_velocity(spec, {Vec4::Zero(), Chart::cartesian}, Vec4(1, 0, 0, 0));
  EXPECT_THROW(integrate_trajectory(spec, s0, 0.0, 10), UsageError);
  EXPECT_THROW(integrate_trajectory(spec, s0, 0.1, -1), UsageError);
  HamiltonianSpec massless{0.0, MetricField::minkowski(), PotentialField::zero()};
  EXPECT_THROW(massless.validate(), UsageError);
}

TEST(Integrator, EquationsOfMotionMatchSecondOrderForm) {
  HamiltonianSpec spec{1.3, MetricField::schwarzschild(1.0), PotentialField::zero()};
  const Vec4 u(1.2, 0.1, 0.02, 0.05);
  const PhaseState s = state_from_velocity(spec, {Vec4(0, 8, 1.0, 0), Chart::spherical}, u);
  const EquationsOfMotion e = eom_rhs(spec, s);
  EXPECT_LE((e.velocity - u).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((e.acceleration - acceleration(spec, s.x.coords, u)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TrajectoryCsv, HeaderAndPrecision) {
  const HamiltonianSpec spec = harmonic_spec();
  const PhaseState s0 = state_from_velocity(spec, {Vec4(0, 1, 0, 0), Chart::cartesian}, Vec4(1, 0, 0, 0));
  const Trajectory t = integrate_trajectory(spec, s0, 0.1, 3);
  std::ostringstream os;
  write_trajectory_csv(os, spec, t.states);
  std::istringstream in(os.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "tau,x0,x1,x2,x3,p0,p1,p2,p3,K");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}
