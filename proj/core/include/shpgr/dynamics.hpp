#pragma once

// Classical evolution in the world time tau: the covariant quadratic
// Hamiltonian with a scalar potential, its equations of motion, and a
// fixed-step RK4 integrator on the second-order (x, dx/dtau) system.

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "shpgr/geometry.hpp"

namespace shpgr {

struct PhaseState {
  SpacetimePoint x;
  Vec4 momentum = Vec4::Zero();  // covariant p_mu
  double tau = 0.0;
};

class PotentialField {
 public:
  using Value = std::function<double(const Vec4&)>;
  using Gradient = std::function<Vec4(const Vec4&)>;

  // Central differences are used for the gradient when none is supplied.
  PotentialField(Value value, Gradient gradient = {});

  static PotentialField zero();
  // V = kappa/2 * (x^axis)^2
  static PotentialField harmonic(double kappa, int axis);

  double value(const Vec4& x) const { return value_(x); }
  Vec4 gradient(const Vec4& x) const;  // dV/dx^mu
  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

 private:
  Value value_;
  Gradient gradient_;
};

struct HamiltonianSpec {
  double mass = 1.0;
  MetricField metric = MetricField::minkowski();
  PotentialField potential = PotentialField::zero();

  // Throws UsageError unless mass > 0.
  void validate() const;
};

// K = (1/2M) g^{mu nu} p_mu p_nu + V(x)
double hamiltonian_value(const HamiltonianSpec& spec, const PhaseState& s);

struct EquationsOfMotion {
  Vec4 velocity;      // dx^mu/dtau = g^{mu nu} p_nu / M
  Vec4 acceleration;  // -Gamma^s_{lg} u^g u^l - g^{s l} dV_l / M
};

EquationsOfMotion eom_rhs(const HamiltonianSpec& spec, const PhaseState& s);

// Second-order form used by the integrator: acceleration at (x, u).
Vec4 acceleration(const HamiltonianSpec& spec, const Vec4& x, const Vec4& u);

struct Trajectory {
  std::vector<PhaseState> states;
  bool exited_domain = false;
};

// Classical RK4 on (x, u).  On leaving the chart domain the states computed
// so far are returned with exited_domain set.
Trajectory integrate_trajectory(const HamiltonianSpec& spec,
                                const PhaseState& initial, double dtau,
                                int steps);

// Builds the phase state with p = M g u at x.
PhaseState state_from_velocity(const HamiltonianSpec& spec,
                               const SpacetimePoint& x, const Vec4& velocity,
                               double tau = 0.0);

// tau, x^0..x^3, p_0..p_3, K with 17 significant digits and a header row.
void write_trajectory_csv(std::ostream& os, const HamiltonianSpec& spec,
                          std::span<const PhaseState> states);

}  // namespace shpgr
