#include "shpgr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <utility>

namespace shpgr {

PotentialField::PotentialField(Value value, Gradient gradient)
    : value_(std::move(value)), gradient_(std::move(gradient)) {
  if (!value_) throw UsageError("potential needs a value function");
}

PotentialField PotentialField::zero() {
  return PotentialField([](const Vec4&) { return 0.0; },
                        [](const Vec4&) { return Vec4::Zero().eval(); });
}

PotentialField PotentialField::harmonic(double kappa, int axis) {
  if (axis < 0 || axis > 3) throw UsageError("harmonic axis out of range");
  return PotentialField(
      [kappa, axis](const Vec4& x) { return 0.5 * kappa * x(axis) * x(axis); },
      [kappa, axis](const Vec4& x) {
        Vec4 g = Vec4::Zero();
        g(axis) = kappa * x(axis);
        return g;
      });
}

Vec4 PotentialField::gradient(const Vec4& x) const {
  if (gradient_) return gradient_(x);
  Vec4 g;
  for (int k = 0; k < 4; ++k) {
    const double h = 1e-5 * std::max(1.0, std::abs(x(k)));
    Vec4 xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    g(k) = (value_(xp) - value_(xm)) / (2.0 * h);
  }
  return g;
}

void HamiltonianSpec::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw UsageError("Hamiltonian mass must be positive");
  }
}

double hamiltonian_value(const HamiltonianSpec& spec, const PhaseState& s) {
  spec.validate();
  const Vec4& p = s.momentum;
  return p.dot(spec.metric.inverse(s.x.coords) * p) / (2.0 * spec.mass) +
         spec.potential.value(s.x.coords);
}

Vec4 acceleration(const HamiltonianSpec& spec, const Vec4& x, const Vec4& u) {
  const Connection gamma = spec.metric.connection(x);
  const Mat4 ginv = spec.metric.inverse(x);
  Vec4 a = -(ginv * spec.potential.gradient(x)) / spec.mass;
  for (int s = 0; s < 4; ++s) a(s) -= u.dot(gamma[s] * u);
  return a;
}

EquationsOfMotion eom_rhs(const HamiltonianSpec& spec, const PhaseState& s) {
  spec.validate();
  const Vec4 u = spec.metric.inverse(s.x.coords) * s.momentum / spec.mass;
  return {u, acceleration(spec, s.x.coords, u)};
}

PhaseState state_from_velocity(const HamiltonianSpec& spec,
                               const SpacetimePoint& x, const Vec4& velocity,
                               double tau) {
  spec.validate();
  return {x, spec.mass * (spec.metric.components(x.coords) * velocity), tau};
}

Trajectory integrate_trajectory(const HamiltonianSpec& spec,
                                const PhaseState& initial, double dtau,
                                int steps) {
  spec.validate();
  if (!(dtau > 0.0)) throw UsageError("dtau must be positive");
  if (steps < 1) throw UsageError("steps must be >= 1");
  if (initial.x.chart != spec.metric.chart()) {
    throw UsageError("initial point chart does not match metric chart");
  }

  Trajectory out;
  out.states.reserve(static_cast<std::size_t>(steps) + 1);
  out.states.push_back(initial);

  Vec4 x = initial.x.coords;
  Vec4 u = spec.metric.inverse(x) * initial.momentum / spec.mass;
  const Chart chart = initial.x.chart;

  for (int n = 0; n < steps; ++n) {
    try {
      const Vec4 k1x = u;
      const Vec4 k1u = acceleration(spec, x, u);
      const Vec4 k2x = u + 0.5 * dtau * k1u;
      const Vec4 k2u = acceleration(spec, x + 0.5 * dtau * k1x, k2x);
      const Vec4 k3x = u + 0.5 * dtau * k2u;
      const Vec4 k3u = acceleration(spec, x + 0.5 * dtau * k2x, k3x);
      const Vec4 k4x = u + dtau * k3u;
      const Vec4 k4u = acceleration(spec, x + dtau * k3x, k4x);

      const Vec4 x_next = x + dtau / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      const Vec4 u_next = u + dtau / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      const Vec4 p_next = spec.mass * (spec.metric.components(x_next) * u_next);

      x = x_next;
      u = u_next;
      out.states.push_back({{x, chart}, p_next, initial.tau + (n + 1) * dtau});
    } catch (const DomainError&) {
      out.exited_domain = true;
      break;
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const HamiltonianSpec& spec,
                          std::span<const PhaseState> states) {
  const auto old_precision = os.precision();
  os << "tau,x0,x1,x2,x3,p0,p1,p2,p3,K\n";
  os << std::setprecision(17);
  for (const PhaseState& s : states) {
    os << s.tau;
    for (int i = 0; i < 4; ++i) os << ',' << s.x.coords(i);
    for (int i = 0; i < 4; ++i) os << ',' << s.momentum(i);
    os << ',' << hamiltonian_value(spec, s) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace shpgr
