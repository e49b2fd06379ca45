#pragma once

// Parallel transport of covariant vectors along prescribed curves, loop
// holonomy, geodesic fans carrying a transported inducing vector, the
// equivalence-class covering of a sampled region, and cut detection.
//
// Two transport laws are provided:
//   TransportMode::paper  dS_mu/dl = -G^l_{mu nu} (dx^nu/dl) S_l, with the
//                         metric's reduced connection (for Schwarzschild the
//                         three components G^phi_{r phi}, G^phi_{theta phi},
//                         G^theta_{phi phi}).  Reproduces the closed-form
//                         circle solution; not metric compatible.
//   TransportMode::full   dS_mu/dl = +G^l_{mu nu} (dx^nu/dl) S_l with the
//                         complete connection; preserves g^{mu nu} S_mu S_nu.

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shpgr/dynamics.hpp"
#include "shpgr/geometry.hpp"

namespace shpgr {

enum class TransportMode { paper, full };

struct TransportPath {
  std::function<SpacetimePoint(double)> curve;  // lambda in [0, 1]
  std::function<Vec4(double)> tangent;          // dx/dlambda
  bool closed = false;
  // Natural subdivision (e.g. sample intervals); the integrator uses a
  // multiple of it so that step boundaries fall on the knots.  0 = smooth.
  int segments = 0;
  // Non-empty for concatenations: transported piecewise, in order, so that
  // corners are never straddled by a single step.
  std::vector<TransportPath> pieces;

  // Constant (t, r, theta) circle, phi = 2 pi turns lambda, on a spherical
  // or orbit_sphere chart.
  static TransportPath latitude_circle(Chart chart, double radius,
                                       double theta, double t = 0.0,
                                       double turns = 1.0);
  // Ellipse in the (axis_a, axis_b) coordinate plane around `center`.
  static TransportPath coordinate_loop(const SpacetimePoint& center,
                                       int axis_a, int axis_b,
                                       double radius_a, double radius_b);
  // Cubic Hermite interpolation through (x, dx/dtau) samples spaced dtau
  // apart.  Closed when the end points agree to `closure_tol`.
  static TransportPath from_samples(std::vector<Vec4> positions,
                                    std::vector<Vec4> velocities, Chart chart,
                                    double dtau, double closure_tol = 1e-12);
  // first on [0, 1/2], second on [1/2, 1].  Throws UsageError unless the
  // end of first meets the start of second to closure_tol.
  static TransportPath concatenate(const TransportPath& first,
                                   const TransportPath& second,
                                   double closure_tol = 1e-12);

  TransportPath reversed() const;
};

// Connection component filter: G^l_{mn} is kept only when l, m and n are
// all enabled.  The default keeps everything.
using IndexMask = std::array<bool, 4>;
inline constexpr IndexMask kAllIndices{true, true, true, true};
inline constexpr IndexMask kAngularIndices{false, false, true, true};

// Linear map from initial to final covariant components along the path
// (column j = transport of the basis covector e_j).  RK4 in lambda.
Mat4 transport_matrix(const TransportPath& path, const MetricField& metric,
                      int steps, TransportMode mode,
                      const IndexMask& mask = kAllIndices);

FourVector transport_paper(const FourVector& s0, const TransportPath& path,
                           const MetricField& metric, int steps);
FourVector transport_full(const FourVector& s0, const TransportPath& path,
                          const MetricField& metric, int steps);

// ---------------------------------------------------------------------------
// Closed form for the reduced system on the Schwarzschild circle.

struct CircleComponents {
  double s_theta = 0.0;
  double s_phi = 0.0;
  double s_r = 0.0;
};

// S_theta(0) = a, S_phi(0) = c.  For k = |cos theta| > 0 the radial
// component is fixed by a: S_r(0) = a sin(theta) cos(theta) / (k^2 r).  On
// the equator (k = 0) S_theta, S_phi stay constant and
// S_r = radial0 - phi c / r.
CircleComponents schwarzschild_circle_closed_form(double a, double c,
                                                  double theta, double r,
                                                  double phi,
                                                  double radial0 = 0.0);

// Threshold below which k = |cos theta| is treated as zero.
inline constexpr double kEquatorTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Holonomy

struct HolonomyResult {
  Mat4 matrix = Mat4::Identity();
  // Rotation of the orthonormal (theta, phi) block (indices 2, 3) at the
  // base point, measured from the theta direction towards phi.  In full
  // mode the block is transported with the angular components of the
  // connection only (the intrinsic connection of the orbit sphere).
  double rotation_angle = 0.0;
  // Rotation angle in [0, pi] of the orthonormal spatial block (indices
  // 1..3) of the complete 4x4 holonomy; meaningful for diagonal metrics.
  double spatial_rotation_angle = 0.0;
};

HolonomyResult holonomy(const TransportPath& path, const MetricField& metric,
                        TransportMode mode, int steps = 4000);

struct CutReport {
  bool cut = false;
  double deviation = 0.0;  // ||H - 1||_inf (max absolute row sum)
  HolonomyResult holonomy;
};

CutReport cut_detection(const TransportPath& path, const MetricField& metric,
                        double tol = 1e-6, int steps = 4000);

// Wraps an angle difference into (-pi, pi].
double wrap_angle(double angle);

// ---------------------------------------------------------------------------
// Geodesics with transported contravariant vectors.

struct GeodesicTransport {
  std::vector<Vec4> positions;
  std::vector<Vec4> velocities;
  // transported[i][k] = k-th vector at sample i (contravariant)
  std::vector<std::vector<Vec4>> transported;
  bool truncated = false;
  Chart chart = Chart::cartesian;
};

// RK4 on (x, u, V_k) with the geodesic equation (V = 0) and
// dV^mu/dtau = -G^mu_{ab} u^a V^b.
GeodesicTransport transport_along_geodesic(const MetricField& metric,
                                           const SpacetimePoint& start,
                                           const Vec4& velocity,
                                           std::span<const Vec4> vectors,
                                           double length, int steps);

struct FanRay {
  std::vector<SpacetimePoint> points;
  std::vector<Vec4> n;  // transported inducing vector, contravariant
  bool truncated = false;
};

// Throws InvariantError unless g(n_p, n_p) = -1 to 1e-9.
std::vector<FanRay> geodesic_fan(const SpacetimePoint& p, const Vec4& n_p,
                                 std::span<const Vec4> directions,
                                 const MetricField& metric, double length,
                                 int steps);

// ---------------------------------------------------------------------------
// Equivalence-class covering

struct SampleGrid {
  std::vector<SpacetimePoint> points;
  std::vector<std::pair<std::size_t, std::size_t>> neighbours;
  double resolution = 0.0;

  // na x nb lattice in the (axis_a, axis_b) coordinate plane starting at
  // origin, with 4-neighbour adjacency.
  static SampleGrid rectangular(const SpacetimePoint& origin, int axis_a,
                                int axis_b, int na, int nb, double da,
                                double db, double resolution);
};

struct FanSeed {
  SpacetimePoint point;
  Vec4 n = Vec4(1, 0, 0, 0);
  std::vector<Vec4> directions;
  double length = 1.0;
  int steps = 100;
};

struct SpinEnsembleChart {
  std::vector<int> assignment;  // seed index per grid point
  std::vector<Vec4> n;          // transported N per grid point
  std::vector<std::pair<std::size_t, std::size_t>> boundary_pairs;
  // max rapidity between the N vectors of a cross-class boundary pair
  double continuity_metric = 0.0;
};

class IncompleteCoverError : public std::runtime_error {
 public:
  IncompleteCoverError(std::vector<std::size_t> uncovered);
  const std::vector<std::size_t>& uncovered() const { return uncovered_; }

 private:
  std::vector<std::size_t> uncovered_;
};

// Grid point i joins the first seed (lowest index) whose fan passes within
// grid.resolution of it, measured with spatial_embedding.
SpinEnsembleChart coverage_classes(const SampleGrid& grid,
                                   std::span<const FanSeed> seeds,
                                   const MetricField& metric);

}  // namespace shpgr
