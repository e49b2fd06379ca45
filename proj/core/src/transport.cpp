#include "shpgr/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace shpgr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool same_point(const SpacetimePoint& a, const SpacetimePoint& b,
                double tol) {
  if (a.chart != b.chart) return false;
  const double dt = std::abs(a.coords(0) - b.coords(0));
  switch (a.chart) {
    case Chart::cartesian:
      return (a.coords - b.coords).cwiseAbs().maxCoeff() <= tol;
    case Chart::spherical:
    case Chart::orbit_sphere:
      // phi is periodic; compare the embedded positions
      return dt <= tol &&
             (spatial_embedding(a) - spatial_embedding(b)).cwiseAbs().maxCoeff() <= tol;
  }
  return false;
}

Connection masked(Connection c, const IndexMask& mask) {
  for (int l = 0; l < 4; ++l) {
    for (int m = 0; m < 4; ++m) {
      for (int n = 0; n < 4; ++n) {
        if (!(mask[l] && mask[m] && mask[n])) c[l](m, n) = 0.0;
      }
    }
  }
  return c;
}

// Generator A(lambda) of dS/dlambda = A S for covariant components.
Mat4 generator(const TransportPath& path, const MetricField& metric,
               TransportMode mode, const IndexMask& mask, double lambda) {
  const SpacetimePoint p = path.curve(lambda);
  const Vec4 t = path.tangent(lambda);
  const bool paper = mode == TransportMode::paper;
  const Connection gamma =
      masked(paper ? metric.reduced_connection(p.coords)
                   : metric.connection(p.coords),
             mask);
  const double sign = paper ? -1.0 : 1.0;
  Mat4 a;
  for (int l = 0; l < 4; ++l) a.col(l) = sign * (gamma[l] * t);
  return a;
}

Mat4 transport_smooth(const TransportPath& path, const MetricField& metric,
                      int steps, TransportMode mode, const IndexMask& mask) {
  if (path.segments > 0 && steps % path.segments != 0) {
    steps = (steps / path.segments + 1) * path.segments;
  }
  const double h = 1.0 / steps;
  Mat4 m = Mat4::Identity();
  Mat4 a0 = generator(path, metric, mode, mask, 0.0);
  for (int n = 0; n < steps; ++n) {
    const double l0 = n * h;
    const Mat4 a_half = generator(path, metric, mode, mask, l0 + 0.5 * h);
    const Mat4 a1 = generator(path, metric, mode, mask,
                              n + 1 == steps ? 1.0 : l0 + h);
    const Mat4 k1 = a0 * m;
    const Mat4 k2 = a_half * (m + 0.5 * h * k1);
    const Mat4 k3 = a_half * (m + 0.5 * h * k2);
    const Mat4 k4 = a1 * (m + h * k3);
    m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a0 = a1;
  }
  return m;
}

}  // namespace

double wrap_angle(double angle) {
  double w = std::remainder(angle, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

// ---------------------------------------------------------------------------
// Paths

TransportPath TransportPath::latitude_circle(Chart chart, double radius,
                                             double theta, double t,
                                             double turns) {
  if (chart == Chart::cartesian) {
    throw UsageError("latitude_circle needs a spherical or orbit_sphere chart");
  }
  TransportPath path;
  const double rate = kTwoPi * turns;
  path.curve = [=](double lambda) {
    return SpacetimePoint{Vec4(t, radius, theta, rate * lambda), chart};
  };
  path.tangent = [=](double) { return Vec4(0.0, 0.0, 0.0, rate); };
  path.closed = std::abs(turns - std::round(turns)) < 1e-15 && turns != 0.0;
  return path;
}

TransportPath TransportPath::coordinate_loop(const SpacetimePoint& center,
                                             int axis_a, int axis_b,
                                             double radius_a,
                                             double radius_b) {
  if (axis_a == axis_b || axis_a < 0 || axis_a > 3 || axis_b < 0 || axis_b > 3) {
    throw UsageError("coordinate_loop axes must be distinct indices in 0..3");
  }
  TransportPath path;
  path.curve = [=](double lambda) {
    SpacetimePoint p = center;
    p.coords(axis_a) += radius_a * std::cos(kTwoPi * lambda);
    p.coords(axis_b) += radius_b * std::sin(kTwoPi * lambda);
    return p;
  };
  path.tangent = [=](double lambda) {
    Vec4 t = Vec4::Zero();
    t(axis_a) = -kTwoPi * radius_a * std::sin(kTwoPi * lambda);
    t(axis_b) = kTwoPi * radius_b * std::cos(kTwoPi * lambda);
    return t;
  };
  path.closed = true;
  return path;
}

TransportPath TransportPath::from_samples(std::vector<Vec4> positions,
                                          std::vector<Vec4> velocities,
                                          Chart chart, double dtau,
                                          double closure_tol) {
  if (positions.size() < 2 || positions.size() != velocities.size()) {
    throw UsageError("from_samples needs >= 2 matching position/velocity samples");
  }
  if (!(dtau > 0.0)) throw UsageError("from_samples: dtau must be positive");
  const int segments = static_cast<int>(positions.size()) - 1;

  struct Knots {
    std::vector<Vec4> x, v;
  };
  auto knots = std::make_shared<Knots>(Knots{std::move(positions), std::move(velocities)});

  auto locate = [segments](double lambda) {
    const double s = std::clamp(lambda, 0.0, 1.0) * segments;
    const int i = std::min(static_cast<int>(std::floor(s)), segments - 1);
    return std::pair<int, double>{i, s - i};
  };

  TransportPath path;
  path.segments = segments;
  path.curve = [=](double lambda) {
    const auto [i, u] = locate(lambda);
    const double u2 = u * u, u3 = u2 * u;
    const Vec4 x = (2 * u3 - 3 * u2 + 1) * knots->x[i] +
                   (u3 - 2 * u2 + u) * dtau * knots->v[i] +
                   (-2 * u3 + 3 * u2) * knots->x[i + 1] +
                   (u3 - u2) * dtau * knots->v[i + 1];
    return SpacetimePoint{x, chart};
  };
  path.tangent = [=](double lambda) {
    const auto [i, u] = locate(lambda);
    const double u2 = u * u;
    const Vec4 dx_du = (6 * u2 - 6 * u) * knots->x[i] +
                       (3 * u2 - 4 * u + 1) * dtau * knots->v[i] +
                       (-6 * u2 + 6 * u) * knots->x[i + 1] +
                       (3 * u2 - 2 * u) * dtau * knots->v[i + 1];
    return (dx_du * segments).eval();
  };
  path.closed = same_point(path.curve(0.0), path.curve(1.0), closure_tol);
  return path;
}

TransportPath TransportPath::concatenate(const TransportPath& first,
                                         const TransportPath& second,
                                         double closure_tol) {
  if (!same_point(first.curve(1.0), second.curve(0.0), closure_tol)) {
    throw UsageError("concatenated paths do not meet");
  }
  TransportPath path;
  path.curve = [first, second](double lambda) {
    return lambda < 0.5 ? first.curve(2.0 * lambda)
                        : second.curve(2.0 * lambda - 1.0);
  };
  path.tangent = [first, second](double lambda) {
    return (lambda < 0.5 ? 2.0 * first.tangent(2.0 * lambda)
                         : 2.0 * second.tangent(2.0 * lambda - 1.0))
        .eval();
  };
  auto append = [&path](const TransportPath& p) {
    if (p.pieces.empty()) {
      path.pieces.push_back(p);
    } else {
      path.pieces.insert(path.pieces.end(), p.pieces.begin(), p.pieces.end());
    }
  };
  append(first);
  append(second);
  path.closed = same_point(first.curve(0.0), second.curve(1.0), closure_tol);
  return path;
}

TransportPath TransportPath::reversed() const {
  TransportPath path;
  const TransportPath self = *this;
  path.curve = [self](double lambda) { return self.curve(1.0 - lambda); };
  path.tangent = [self](double lambda) {
    return (-self.tangent(1.0 - lambda)).eval();
  };
  path.closed = closed;
  path.segments = segments;
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
    path.pieces.push_back(it->reversed());
  }
  return path;
}

// ---------------------------------------------------------------------------
// Transport

Mat4 transport_matrix(const TransportPath& path, const MetricField& metric,
                      int steps, TransportMode mode, const IndexMask& mask) {
  if (steps < 1) throw UsageError("transport needs at least one step");
  if (path.pieces.empty()) {
    return transport_smooth(path, metric, steps, mode, mask);
  }
  const int per_piece =
      std::max(1, steps / static_cast<int>(path.pieces.size()));
  Mat4 m = Mat4::Identity();
  for (const TransportPath& piece : path.pieces) {
    m = (transport_matrix(piece, metric, per_piece, mode, mask) * m).eval();
  }
  return m;
}

namespace {

FourVector transport_covector(const FourVector& s0, const TransportPath& path,
                              const MetricField& metric, int steps,
                              TransportMode mode) {
  if (s0.variance != Variance::covariant) {
    throw UsageError("transport expects a covariant vector");
  }
  const Mat4 m = transport_matrix(path, metric, steps, mode);
  return {m * s0.components, Variance::covariant, path.curve(1.0)};
}

}  // namespace

FourVector transport_paper(const FourVector& s0, const TransportPath& path,
                           const MetricField& metric, int steps) {
  return transport_covector(s0, path, metric, steps, TransportMode::paper);
}

FourVector transport_full(const FourVector& s0, const TransportPath& path,
                          const MetricField& metric, int steps) {
  return transport_covector(s0, path, metric, steps, TransportMode::full);
}

CircleComponents schwarzschild_circle_closed_form(double a, double c,
                                                  double theta, double r,
                                                  double phi,
                                                  double radial0) {
  if (!(theta > 0.0 && theta < std::numbers::pi)) {
    throw DomainError("closed form needs 0 < theta < pi");
  }
  if (!(r > 0.0)) throw DomainError("closed form needs r > 0");
  const double st = std::sin(theta), ct = std::cos(theta);
  const double k = std::abs(ct);
  if (k < kEquatorTolerance) {
    return {a, c, radial0 - phi * c / r};
  }
  const double sc = st * ct;
  const double skp = std::sin(k * phi), ckp = std::cos(k * phi);
  CircleComponents out;
  out.s_theta = a * ckp - c * (ct / st / k) * skp;
  out.s_phi = c * ckp + a * (sc / k) * skp;
  out.s_r = -(c * skp - a * (sc / k) * ckp) / (k * r);
  return out;
}

// ---------------------------------------------------------------------------
// Holonomy

HolonomyResult holonomy(const TransportPath& path, const MetricField& metric,
                        TransportMode mode, int steps) {
  if (!path.closed) throw UsageError("holonomy needs a closed path");
  HolonomyResult out;
  out.matrix = transport_matrix(path, metric, steps, mode);

  const Vec4 base = path.curve(0.0).coords;
  const Mat4 ginv = metric.inverse(base);

  const Mat4 angular = mode == TransportMode::full
                           ? transport_matrix(path, metric, steps, mode,
                                              kAngularIndices)
                           : out.matrix;
  const Eigen::Vector2d d2(std::sqrt(std::abs(ginv(2, 2))),
                           std::sqrt(std::abs(ginv(3, 3))));
  const Eigen::Matrix2d r2 =
      d2.asDiagonal() * angular.block<2, 2>(2, 2) * d2.cwiseInverse().asDiagonal();
  out.rotation_angle = std::atan2(r2(0, 1), r2(0, 0));

  const Eigen::Vector3d d3(std::sqrt(std::abs(ginv(1, 1))),
                           std::sqrt(std::abs(ginv(2, 2))),
                           std::sqrt(std::abs(ginv(3, 3))));
  const Eigen::Matrix3d r3 =
      d3.asDiagonal() * out.matrix.block<3, 3>(1, 1) * d3.cwiseInverse().asDiagonal();
  out.spatial_rotation_angle =
      std::acos(std::clamp((r3.trace() - 1.0) / 2.0, -1.0, 1.0));
  return out;
}

CutReport cut_detection(const TransportPath& path, const MetricField& metric,
                        double tol, int steps) {
  CutReport report;
  report.holonomy = holonomy(path, metric, TransportMode::full, steps);
  report.deviation = (report.holonomy.matrix - Mat4::Identity())
                         .cwiseAbs()
                         .rowwise()
                         .sum()
                         .maxCoeff();
  report.cut = report.deviation > tol;
  return report;
}

// ---------------------------------------------------------------------------
// Geodesics

GeodesicTransport transport_along_geodesic(const MetricField& metric,
                                           const SpacetimePoint& start,
                                           const Vec4& velocity,
                                           std::span<const Vec4> vectors,
                                           double length, int steps) {
  if (start.chart != metric.chart()) {
    throw UsageError("start point chart does not match metric chart");
  }
  if (steps < 1 || !(length > 0.0)) {
    throw UsageError("geodesic needs length > 0 and steps >= 1");
  }
  const HamiltonianSpec free_particle{1.0, metric, PotentialField::zero()};
  const std::size_t nv = vectors.size();

  struct State {
    Vec4 x, u;
    std::vector<Vec4> v;
  };
  auto rhs = [&](const State& s) {
    State d;
    d.x = s.u;
    d.u = acceleration(free_particle, s.x, s.u);
    const Connection gamma = metric.connection(s.x);
    d.v.resize(nv);
    for (std::size_t k = 0; k < nv; ++k) {
      for (int m = 0; m < 4; ++m) d.v[k](m) = -s.u.dot(gamma[m] * s.v[k]);
    }
    return d;
  };
  auto axpy = [nv](const State& s, double h, const State& d) {
    State out{s.x + h * d.x, s.u + h * d.u, s.v};
    for (std::size_t k = 0; k < nv; ++k) out.v[k] += h * d.v[k];
    return out;
  };

  GeodesicTransport out;
  out.chart = start.chart;
  State s{start.coords, velocity, {vectors.begin(), vectors.end()}};
  metric.check_domain(s.x);
  out.positions.push_back(s.x);
  out.velocities.push_back(s.u);
  out.transported.push_back(s.v);

  const double h = length / steps;
  for (int n = 0; n < steps; ++n) {
    try {
      const State k1 = rhs(s);
      const State k2 = rhs(axpy(s, 0.5 * h, k1));
      const State k3 = rhs(axpy(s, 0.5 * h, k2));
      const State k4 = rhs(axpy(s, h, k3));
      State next = s;
      next.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
      next.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
      for (std::size_t k = 0; k < nv; ++k) {
        next.v[k] += h / 6.0 * (k1.v[k] + 2.0 * k2.v[k] + 2.0 * k3.v[k] + k4.v[k]);
      }
      metric.check_domain(next.x);
      s = std::move(next);
    } catch (const DomainError&) {
      out.truncated = true;
      break;
    }
    out.positions.push_back(s.x);
    out.velocities.push_back(s.u);
    out.transported.push_back(s.v);
  }
  return out;
}

std::vector<FanRay> geodesic_fan(const SpacetimePoint& p, const Vec4& n_p,
                                 std::span<const Vec4> directions,
                                 const MetricField& metric, double length,
                                 int steps) {
  const double norm = inner(metric, p.coords, n_p, n_p);
  if (std::abs(norm + 1.0) > 1e-9) {
    throw InvariantError("inducing vector must satisfy N.N = -1");
  }
  std::vector<FanRay> rays;
  rays.reserve(directions.size());
  const Vec4 carried[1] = {n_p};
  for (const Vec4& dir : directions) {
    const GeodesicTransport g =
        transport_along_geodesic(metric, p, dir, carried, length, steps);
    FanRay ray;
    ray.truncated = g.truncated;
    ray.points.reserve(g.positions.size());
    for (std::size_t i = 0; i < g.positions.size(); ++i) {
      ray.points.push_back({g.positions[i], p.chart});
      ray.n.push_back(g.transported[i][0]);
    }
    rays.push_back(std::move(ray));
  }
  return rays;
}

// ---------------------------------------------------------------------------
// Coverage

SampleGrid SampleGrid::rectangular(const SpacetimePoint& origin, int axis_a,
                                   int axis_b, int na, int nb, double da,
                                   double db, double resolution) {
  if (na < 1 || nb < 1 || axis_a == axis_b) {
    throw UsageError("rectangular grid needs na, nb >= 1 and distinct axes");
  }
  SampleGrid grid;
  grid.resolution = resolution;
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      SpacetimePoint p = origin;
      p.coords(axis_a) += i * da;
      p.coords(axis_b) += j * db;
      grid.points.push_back(p);
      const std::size_t idx = static_cast<std::size_t>(i * nb + j);
      if (i + 1 < na) grid.neighbours.emplace_back(idx, idx + nb);
      if (j + 1 < nb) grid.neighbours.emplace_back(idx, idx + 1);
    }
  }
  return grid;
}

IncompleteCoverError::IncompleteCoverError(std::vector<std::size_t> uncovered)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << uncovered.size() << " grid point(s) not reached by any fan:";
        const std::size_t shown = std::min<std::size_t>(uncovered.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) os << ' ' << uncovered[i];
        if (shown < uncovered.size()) os << " ...";
        return os.str();
      }()),
      uncovered_(std::move(uncovered)) {}

SpinEnsembleChart coverage_classes(const SampleGrid& grid,
                                   std::span<const FanSeed> seeds,
                                   const MetricField& metric) {
  if (seeds.empty()) throw UsageError("coverage needs at least one seed");
  const std::size_t n = grid.points.size();

  SpinEnsembleChart chart;
  chart.assignment.assign(n, -1);
  chart.n.assign(n, Vec4::Zero());

  std::vector<Eigen::Vector3d> grid_pos(n);
  for (std::size_t i = 0; i < n; ++i) grid_pos[i] = spatial_embedding(grid.points[i]);

  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const FanSeed& seed = seeds[s];
    const std::vector<FanRay> rays = geodesic_fan(
        seed.point, seed.n, seed.directions, metric, seed.length, seed.steps);

    std::vector<Eigen::Vector3d> ray_pos;
    std::vector<Vec4> ray_n;
    for (const FanRay& ray : rays) {
      for (std::size_t k = 0; k < ray.points.size(); ++k) {
        ray_pos.push_back(spatial_embedding(ray.points[k]));
        ray_n.push_back(ray.n[k]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (chart.assignment[i] >= 0) continue;
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < ray_pos.size(); ++k) {
        const double d = (ray_pos[k] - grid_pos[i]).norm();
        if (d < best) {
          best = d;
          best_k = k;
        }
      }
      if (best <= grid.resolution) {
        chart.assignment[i] = static_cast<int>(s);
        chart.n[i] = ray_n[best_k];
      }
    }
  }

  std::vector<std::size_t> uncovered;
  for (std::size_t i = 0; i < n; ++i) {
    if (chart.assignment[i] < 0) uncovered.push_back(i);
  }
  if (!uncovered.empty()) throw IncompleteCoverError(std::move(uncovered));

  for (const auto& [i, j] : grid.neighbours) {
    if (chart.assignment[i] == chart.assignment[j]) continue;
    chart.boundary_pairs.emplace_back(i, j);
    const double gamma =
        -inner(metric, grid.points[i].coords, chart.n[i], chart.n[j]);
    chart.continuity_metric =
        std::max(chart.continuity_metric, std::acosh(std::max(1.0, gamma)));
  }
  return chart;
}

}  // namespace shpgr
