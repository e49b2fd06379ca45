#include "shpgr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace shpgr {

namespace {

Connection zero_connection() {
  Connection c;
  for (auto& m : c) m.setZero();
  return c;
}

void check_finite(const Vec4& x) {
  if (!x.allFinite()) throw DomainError("non-finite coordinates");
}

std::string describe(const Vec4& x) {
  std::ostringstream os;
  os << "(" << x(0) << ", " << x(1) << ", " << x(2) << ", " << x(3) << ")";
  return os.str();
}

void check_polar_angle(const Vec4& x) {
  const double theta = x(2);
  if (!(theta > kDomainEpsilon && theta < std::numbers::pi - kDomainEpsilon)) {
    throw DomainError("polar angle outside (0, pi) at " + describe(x));
  }
}

}  // namespace

std::string_view chart_name(Chart chart) {
  switch (chart) {
    case Chart::cartesian:
      return "cartesian";
    case Chart::spherical:
      return "spherical";
    case Chart::orbit_sphere:
      return "orbit_sphere";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Diffeomorphism

Mat4 Diffeomorphism::inverse_jacobian(const Vec4& x) const {
  if (inverse_jacobian_fn) return inverse_jacobian_fn(x);
  const Mat4 j = jacobian(x);
  Mat4 inv;
  bool ok = false;
  double det = 0.0;
  j.computeInverseAndDetWithCheck(inv, det, ok, 1e-14);
  if (!ok) throw DegeneracyError("singular Jacobian in " + name);
  return inv;
}

Vec4 Diffeomorphism::inverse(const Vec4& xi, const Vec4& guess) const {
  if (inverse_fn) return inverse_fn(xi);
  Vec4 x = guess;
  for (int iter = 0; iter < 100; ++iter) {
    const Vec4 residual = forward(x) - xi;
    const Vec4 dx = inverse_jacobian(x) * residual;
    x -= dx;
    if (dx.norm() <= 1e-15 * (1.0 + x.norm())) return x;
  }
  throw DegeneracyError("Newton inverse of " + name + " did not converge");
}

Diffeomorphism Diffeomorphism::identity() {
  Diffeomorphism d;
  d.name = "identity";
  d.forward = [](const Vec4& x) { return x; };
  d.jacobian = [](const Vec4&) { return Mat4::Identity().eval(); };
  d.inverse_jacobian_fn = [](const Vec4&) { return Mat4::Identity().eval(); };
  d.inverse_fn = [](const Vec4& xi) { return xi; };
  return d;
}

Diffeomorphism Diffeomorphism::spherical_to_cartesian() {
  Diffeomorphism d;
  d.name = "spherical_to_cartesian";
  d.source_chart = Chart::spherical;
  d.target_chart = Chart::cartesian;
  d.forward = [](const Vec4& x) {
    const double r = x(1), st = std::sin(x(2)), ct = std::cos(x(2));
    const double sp = std::sin(x(3)), cp = std::cos(x(3));
    return Vec4(x(0), r * st * cp, r * st * sp, r * ct);
  };
  d.jacobian = [](const Vec4& x) {
    const double r = x(1), st = std::sin(x(2)), ct = std::cos(x(2));
    const double sp = std::sin(x(3)), cp = std::cos(x(3));
    Mat4 j;
    j << 1, 0, 0, 0,
         0, st * cp, r * ct * cp, -r * st * sp,
         0, st * sp, r * ct * sp, r * st * cp,
         0, ct, -r * st, 0;
    return j;
  };
  d.inverse_jacobian_fn = [](const Vec4& x) {
    const double r = x(1), st = std::sin(x(2)), ct = std::cos(x(2));
    const double sp = std::sin(x(3)), cp = std::cos(x(3));
    if (r <= 0.0 || std::abs(st) < kDomainEpsilon) {
      throw DegeneracyError("spherical Jacobian singular on the axis");
    }
    Mat4 j;
    j << 1, 0, 0, 0,
         0, st * cp, st * sp, ct,
         0, ct * cp / r, ct * sp / r, -st / r,
         0, -sp / (r * st), cp / (r * st), 0;
    return j;
  };
  d.inverse_fn = [](const Vec4& xi) {
    const double r = xi.tail<3>().norm();
    if (r <= 0.0) throw DegeneracyError("spherical inverse at the origin");
    return Vec4(xi(0), r, std::acos(xi(3) / r), std::atan2(xi(2), xi(1)));
  };
  return d;
}

Diffeomorphism Diffeomorphism::smooth_test_map(double strength) {
  if (!(std::abs(strength) < 0.5)) {
    throw UsageError("smooth_test_map strength must satisfy |s| < 1/2");
  }
  const double s = strength;
  Diffeomorphism d;
  d.name = "smooth_test_map";
  d.forward = [s](const Vec4& x) {
    return Vec4(x(0) + 0.5 * s * std::sin(x(1)), x(1) + s * std::sin(x(2)),
                x(2) + s * std::sin(x(3)), x(3) + s * std::sin(x(1)));
  };
  d.jacobian = [s](const Vec4& x) {
    Mat4 j = Mat4::Identity();
    j(0, 1) = 0.5 * s * std::cos(x(1));
    j(1, 2) = s * std::cos(x(2));
    j(2, 3) = s * std::cos(x(3));
    j(3, 1) = s * std::cos(x(1));
    return j;
  };
  return d;
}

Diffeomorphism Diffeomorphism::compose(const Diffeomorphism& outer,
                                       const Diffeomorphism& inner) {
  Diffeomorphism d;
  d.name = outer.name + "*" + inner.name;
  d.source_chart = inner.source_chart;
  d.target_chart = outer.target_chart;
  d.forward = [outer, inner](const Vec4& x) {
    return outer.forward(inner.forward(x));
  };
  d.jacobian = [outer, inner](const Vec4& x) {
    return (outer.jacobian(inner.forward(x)) * inner.jacobian(x)).eval();
  };
  return d;
}

// ---------------------------------------------------------------------------
// MetricField

MetricField MetricField::minkowski() {
  MetricField m;
  m.name_ = "minkowski";
  m.chart_ = Chart::cartesian;
  m.mode_ = ChristoffelMode::analytic;
  m.evaluator_ = [](const Vec4&) {
    return Vec4(-1.0, 1.0, 1.0, 1.0).asDiagonal().toDenseMatrix();
  };
  m.analytic_ = [](const Vec4&) { return zero_connection(); };
  return m;
}

MetricField MetricField::schwarzschild(double mass) {
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw UsageError("Schwarzschild mass must be finite and non-negative");
  }
  MetricField m;
  m.name_ = "schwarzschild";
  m.chart_ = Chart::spherical;
  m.mode_ = ChristoffelMode::analytic;
  m.parameters_ = {mass};
  m.domain_ = [mass](const Vec4& x) {
    if (!(x(1) > 2.0 * mass + kDomainEpsilon)) {
      throw DomainError("Schwarzschild radius r <= 2M at " + describe(x));
    }
    check_polar_angle(x);
  };
  m.evaluator_ = [mass](const Vec4& x) {
    const double r = x(1), st = std::sin(x(2));
    const double f = 1.0 - 2.0 * mass / r;
    return Vec4(-f, 1.0 / f, r * r, r * r * st * st)
        .asDiagonal()
        .toDenseMatrix();
  };
  m.analytic_ = [mass](const Vec4& x) {
    const double r = x(1), st = std::sin(x(2)), ct = std::cos(x(2));
    const double f = 1.0 - 2.0 * mass / r;
    Connection c = zero_connection();
    c[0](0, 1) = c[0](1, 0) = mass / (r * r * f);
    c[1](0, 0) = mass * f / (r * r);
    c[1](1, 1) = -mass / (r * r * f);
    c[1](2, 2) = -r * f;
    c[1](3, 3) = -r * f * st * st;
    c[2](1, 2) = c[2](2, 1) = 1.0 / r;
    c[2](3, 3) = -st * ct;
    c[3](1, 3) = c[3](3, 1) = 1.0 / r;
    c[3](2, 3) = c[3](3, 2) = ct / st;
    return c;
  };
  // The three components entering transport around a constant (t, r, theta)
  // circle, as tabulated for the closed-form example.
  m.reduced_ = [](const Vec4& x) {
    const double r = x(1), st = std::sin(x(2)), ct = std::cos(x(2));
    Connection c = zero_connection();
    c[3](1, 3) = c[3](3, 1) = 1.0 / r;
    c[3](2, 3) = c[3](3, 2) = ct / st;
    c[2](3, 3) = -st * ct;
    return c;
  };
  return m;
}

MetricField MetricField::orbit_sphere(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw UsageError("orbit sphere radius must be positive");
  }
  MetricField m;
  m.name_ = "orbit_sphere";
  m.chart_ = Chart::orbit_sphere;
  m.mode_ = ChristoffelMode::analytic;
  m.parameters_ = {radius};
  m.domain_ = [](const Vec4& x) { check_polar_angle(x); };
  m.evaluator_ = [radius](const Vec4& x) {
    const double st = std::sin(x(2));
    const double r2 = radius * radius;
    return Vec4(-1.0, 1.0, r2, r2 * st * st).asDiagonal().toDenseMatrix();
  };
  m.analytic_ = [](const Vec4& x) {
    const double st = std::sin(x(2)), ct = std::cos(x(2));
    Connection c = zero_connection();
    c[2](3, 3) = -st * ct;
    c[3](2, 3) = c[3](3, 2) = ct / st;
    return c;
  };
  return m;
}

MetricField MetricField::custom(std::string name, Chart chart, Evaluator g,
                                DomainCheck domain) {
  MetricField m;
  m.name_ = std::move(name);
  m.chart_ = chart;
  m.mode_ = ChristoffelMode::finite_difference;
  m.evaluator_ = std::move(g);
  m.domain_ = std::move(domain);
  return m;
}

MetricField MetricField::pullback(const MetricField& target,
                                  const Diffeomorphism& phi) {
  if (phi.target_chart != target.chart()) {
    throw UsageError("pullback: diffeomorphism target chart does not match metric");
  }
  MetricField m;
  m.name_ = "pullback(" + target.name() + ", " + phi.name + ")";
  m.chart_ = phi.source_chart;
  m.mode_ = ChristoffelMode::finite_difference;
  m.parameters_ = target.parameters();
  m.evaluator_ = [target, phi](const Vec4& x) {
    const Mat4 j = phi.jacobian(x);
    return (j.transpose() * target.components(phi.forward(x)) * j).eval();
  };
  m.domain_ = [target, phi](const Vec4& x) {
    target.check_domain(phi.forward(x));
  };
  return m;
}

MetricField MetricField::with_mode(ChristoffelMode mode) const {
  if (mode == ChristoffelMode::analytic && !analytic_) {
    throw UsageError("metric '" + name_ + "' has no analytic connection");
  }
  MetricField copy = *this;
  copy.mode_ = mode;
  return copy;
}

void MetricField::check_domain(const Vec4& x) const {
  check_finite(x);
  if (domain_) domain_(x);
}

Mat4 MetricField::components(const Vec4& x) const {
  check_domain(x);
  const Mat4 g = evaluator_(x);
  return (0.5 * (g + g.transpose())).eval();
}

Mat4 MetricField::inverse(const Vec4& x) const {
  const Mat4 g = components(x);
  Mat4 inv;
  bool ok = false;
  double det = 0.0;
  g.computeInverseAndDetWithCheck(inv, det, ok, 1e-300);
  if (!ok || !inv.allFinite()) {
    throw DegeneracyError("degenerate metric at " + describe(x));
  }
  return (0.5 * (inv + inv.transpose())).eval();
}

double MetricField::fd_step(const Vec4& x, int index) {
  return 1e-4 * std::max(1.0, std::abs(x(index)));
}

Connection MetricField::fd_connection(const Vec4& x) const {
  std::array<Mat4, 4> dg;
  for (int k = 0; k < 4; ++k) {
    const double h = fd_step(x, k);
    Vec4 xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    dg[k] = (components(xp) - components(xm)) / (2.0 * h);
  }
  const Mat4 ginv = inverse(x);
  Connection c = zero_connection();
  for (int l = 0; l < 4; ++l) {
    for (int m = 0; m < 4; ++m) {
      for (int n = m; n < 4; ++n) {
        double sum = 0.0;
        for (int s = 0; s < 4; ++s) {
          sum += ginv(l, s) * (dg[m](s, n) + dg[n](s, m) - dg[s](m, n));
        }
        c[l](m, n) = c[l](n, m) = 0.5 * sum;
      }
    }
  }
  return c;
}

Connection MetricField::connection(const Vec4& x) const {
  check_domain(x);
  if (mode_ == ChristoffelMode::analytic && analytic_) return analytic_(x);
  return fd_connection(x);
}

Connection MetricField::reduced_connection(const Vec4& x) const {
  if (!reduced_) return connection(x);
  check_domain(x);
  return reduced_(x);
}

// ---------------------------------------------------------------------------

SignatureCount signature_of(const Mat4& g, double zero_tol) {
  Eigen::SelfAdjointEigenSolver<Mat4> solver(g, Eigen::EigenvaluesOnly);
  SignatureCount count;
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  for (int i = 0; i < 4; ++i) {
    const double ev = solver.eigenvalues()(i);
    if (std::abs(ev) <= zero_tol * scale) {
      ++count.zero;
    } else if (ev < 0.0) {
      ++count.negative;
    } else {
      ++count.positive;
    }
  }
  return count;
}

bool is_lorentzian(const Mat4& g) {
  const SignatureCount c = signature_of(g);
  return c.zero == 0 && c.negative == 1 && c.positive == 3;
}

Mat4 metric_at(const MetricField& metric, const SpacetimePoint& x) {
  if (x.chart != metric.chart()) {
    throw UsageError("point chart does not match metric chart");
  }
  const Mat4 g = metric.components(x.coords);
  const SignatureCount c = signature_of(g);
  if (c.zero != 0) throw DegeneracyError("degenerate metric at " + describe(x.coords));
  if (c.negative != 1 || c.positive != 3) {
    throw InvariantError("metric signature is not (-,+,+,+) at " + describe(x.coords));
  }
  return g;
}

ChristoffelTensor christoffel_at(const MetricField& metric,
                                 const SpacetimePoint& x) {
  if (x.chart != metric.chart()) {
    throw UsageError("point chart does not match metric chart");
  }
  return {metric.connection(x.coords), x};
}

FourVector raise_index(const FourVector& v, const MetricField& metric) {
  if (v.variance != Variance::covariant) {
    throw UsageError("raise_index expects a covariant vector");
  }
  return {metric.inverse(v.base.coords) * v.components, Variance::contravariant,
          v.base};
}

FourVector lower_index(const FourVector& v, const MetricField& metric) {
  if (v.variance != Variance::contravariant) {
    throw UsageError("lower_index expects a contravariant vector");
  }
  return {metric.components(v.base.coords) * v.components, Variance::covariant,
          v.base};
}

double inner(const MetricField& metric, const Vec4& x, const Vec4& a,
             const Vec4& b) {
  return a.dot(metric.components(x) * b);
}

double inner_covariant(const MetricField& metric, const Vec4& x,
                       const Vec4& a, const Vec4& b) {
  return a.dot(metric.inverse(x) * b);
}

Eigen::Vector3d spatial_embedding(const SpacetimePoint& p) {
  const Vec4& x = p.coords;
  switch (p.chart) {
    case Chart::cartesian:
      return x.tail<3>();
    case Chart::spherical:
    case Chart::orbit_sphere: {
      const double r = x(1), st = std::sin(x(2)), ct = std::cos(x(2));
      return {r * st * std::cos(x(3)), r * st * std::sin(x(3)), r * ct};
    }
  }
  return x.tail<3>();
}

// ---------------------------------------------------------------------------
// Poisson brackets

PhaseFunction zeta_coordinate(int a) {
  if (a < 0 || a >= 8) throw UsageError("zeta index out of range");
  return [a](const ExtendedPhasePoint& z) { return z.zeta(a); };
}

PhaseFunction eta_coordinate(int a) {
  if (a < 0 || a >= 8) throw UsageError("eta index out of range");
  return [a](const ExtendedPhasePoint& z) { return z.eta(a); };
}

namespace {

struct Gradient {
  Eigen::Matrix<double, 8, 1> d_zeta;
  Eigen::Matrix<double, 8, 1> d_eta;
};

Gradient gradient(const PhaseFunction& f, const ExtendedPhasePoint& z,
                  double h) {
  Gradient g;
  for (int a = 0; a < 8; ++a) {
    const double hz = h * std::max(1.0, std::abs(z.zeta(a)));
    ExtendedPhasePoint p = z, m = z;
    p.zeta(a) += hz;
    m.zeta(a) -= hz;
    g.d_zeta(a) = (f(p) - f(m)) / (2.0 * hz);

    const double he = h * std::max(1.0, std::abs(z.eta(a)));
    p = z;
    m = z;
    p.eta(a) += he;
    m.eta(a) -= he;
    g.d_eta(a) = (f(p) - f(m)) / (2.0 * he);
  }
  return g;
}

}  // namespace

double poisson_bracket(const PhaseFunction& a, const PhaseFunction& b,
                       const ExtendedPhasePoint& z, double h) {
  const Gradient ga = gradient(a, z, h);
  const Gradient gb = gradient(b, z, h);
  return ga.d_zeta.dot(gb.d_eta) - ga.d_eta.dot(gb.d_zeta);
}

ExtendedPhasePoint to_flat_frame(const Diffeomorphism& phi,
                                 const ExtendedPhasePoint& manifold,
                                 const Vec4& linearization_point) {
  const Vec4 x = manifold.zeta.head<4>();
  const Vec4 big_n = manifold.zeta.tail<4>();
  const Vec4 p = manifold.eta.head<4>();
  const Vec4 big_m = manifold.eta.tail<4>();

  const Mat4 j = phi.jacobian(x);
  const Mat4 j0 = phi.jacobian(linearization_point);
  const Mat4 j0_inv = phi.inverse_jacobian(linearization_point);

  ExtendedPhasePoint flat;
  flat.zeta.head<4>() = phi.forward(x);
  flat.zeta.tail<4>() = j0 * big_n;
  // pi = (J^{-1})^T p, solved rather than inverted at the moving point.
  flat.eta.head<4>() = j.transpose().partialPivLu().solve(p);
  flat.eta.tail<4>() = j0_inv.transpose() * big_m;
  return flat;
}

BracketComparison poisson_bracket_invariance(const Diffeomorphism& phi,
                                             const PhaseFunction& a,
                                             const PhaseFunction& b,
                                             const ExtendedPhasePoint& z,
                                             const Vec4& guess, double h) {
  const Vec4 x = phi.inverse(z.zeta.head<4>(), guess);
  const Mat4 j = phi.jacobian(x);
  if (std::abs(j.determinant()) < 1e-14) {
    throw DegeneracyError("singular Jacobian in " + phi.name);
  }
  const Mat4 j_inv = phi.inverse_jacobian(x);

  ExtendedPhasePoint manifold;
  manifold.zeta.head<4>() = x;
  manifold.zeta.tail<4>() = j_inv * z.zeta.tail<4>();
  manifold.eta.head<4>() = j.transpose() * z.eta.head<4>();
  manifold.eta.tail<4>() = j.transpose() * z.eta.tail<4>();

  const PhaseFunction a_pulled = [&](const ExtendedPhasePoint& w) {
    return a(to_flat_frame(phi, w, x));
  };
  const PhaseFunction b_pulled = [&](const ExtendedPhasePoint& w) {
    return b(to_flat_frame(phi, w, x));
  };

  BracketComparison out;
  out.flat_frame = poisson_bracket(a, b, z, h);
  out.manifold_frame = poisson_bracket(a_pulled, b_pulled, manifold, h);
  out.residual = std::abs(out.flat_frame - out.manifold_frame);
  return out;
}

}  // namespace shpgr
