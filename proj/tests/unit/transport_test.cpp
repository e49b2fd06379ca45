#include <gtest/gtest.h>

#include <chrono>

#include "shpgr/transport.hpp"
#include "support.hpp"

using namespace shpgr;
using shpgr::test::kPi;
using shpgr::test::uniform;

namespace {

const MetricField kSchw = MetricField::schwarzschild(1.0);

Vec4 paper_start(double a, double c, double th, double r) {
  const double k = std::abs(std::cos(th));
  return Vec4(0, a * std::sin(th) * std::cos(th) / (k * k * r), a, c);
}

}  // namespace

TEST(ClosedForm, MatchesAtZero) {
  const CircleComponents c = schwarzschild_circle_closed_form(1.0, 0.5, 1.0, 10.0, 0.0);
  EXPECT_DOUBLE_EQ(c.s_theta, 1.0);
  EXPECT_DOUBLE_EQ(c.s_phi, 0.5);
  EXPECT_NEAR(c.s_r, std::sin(1.0) * std::cos(1.0) / (std::cos(1.0) * std::cos(1.0) * 10.0), 1e-15);
}

TEST(ClosedForm, EquatorIsLinearInRadial) {
  const CircleComponents c = schwarzschild_circle_closed_form(0.7, 0.5, kPi / 2, 8.0, 2.0, 0.3);
  EXPECT_DOUBLE_EQ(c.s_theta, 0.7);
  EXPECT_DOUBLE_EQ(c.s_phi, 0.5);
  EXPECT_NEAR(c.s_r, 0.3 - 2.0 * 0.5 / 8.0, 1e-15);
}

TEST(PaperTransport, FiftyRandomDrawsMatchClosedForm) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a = uniform(-2, 2), c = uniform(-2, 2);
    double th = uniform(0.15, kPi - 0.15);
    if (std::abs(std::cos(th)) < 0.05) th += 0.2;
    const double r = uniform(2.5, 30.0), phi = uniform(0.0, 4 * kPi);
    const TransportPath path = TransportPath::latitude_circle(Chart::spherical, r, th, 0.0, phi / (2 * kPi));
    const Vec4 s = transport_matrix(path, kSchw, 4000, TransportMode::paper) * paper_start(a, c, th, r);
    const CircleComponents cf = schwarzschild_circle_closed_form(a, c, th, r, phi);
    worst = std::max({worst, std::abs(s(1) - cf.s_r), std::abs(s(2) - cf.s_theta),
                      std::abs(s(3) - cf.s_phi)});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LE(worst, 1e-8);
  EXPECT_LT(secs, 5.0);
}

TEST(PaperTransport, FourVectorWrapperAgreesWithMatrix) {
  const TransportPath path = TransportPath::latitude_circle(Chart::spherical, 10, 1.0);
  const Vec4 s0 = paper_start(1, 0.5, 1.0, 10);
  const FourVector out = transport_paper({s0, Variance::covariant, {Vec4(0, 10, 1.0, 0), Chart::spherical}}, path, kSchw, 2000);
  EXPECT_LE((out.components - transport_matrix(path, kSchw, 2000, TransportMode::paper) * s0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FullTransport, PreservesNorm) {
  const TransportPath path = TransportPath::latitude_circle(Chart::spherical, 7, 0.9, 0.0, 1.3);
  const Vec4 s0(0.1, 0.4, 1.0, -0.6);
  const Vec4 s = transport_matrix(path, kSchw, 4000, TransportMode::full) * s0;
  const Vec4 x(0, 7, 0.9, 0);
  EXPECT_NEAR(inner_covariant(kSchw, x, s, s), inner_covariant(kSchw, x, s0, s0), 1e-10);
}

TEST(FullTransport, ReversedPathUndoesTransport) {
  const TransportPath path = TransportPath::latitude_circle(Chart::spherical, 7, 0.9, 0.0, 0.4);
  const Mat4 fwd = transport_matrix(path, kSchw, 2000, TransportMode::full);
  const Mat4 back = transport_matrix(path.reversed(), kSchw, 2000, TransportMode::full);
  EXPECT_LE((back * fwd - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Holonomy, MinkowskiLoopsAreTrivial) {
  const MetricField m = MetricField::minkowski();
  for (int axes = 0; axes < 3; ++axes) {
    const TransportPath loop = TransportPath::coordinate_loop({Vec4(0.5, 1, -1, 2), Chart::cartesian},
                                                              axes, axes + 1, 1.0, 2.5);
    const CutReport c = cut_detection(loop, m, 1e-6, 2000);
    EXPECT_LE(c.deviation, 1e-10);
    EXPECT_FALSE(c.cut);
  }
}

TEST(Holonomy, FlatSphericalLoopIsTrivial) {
  const MetricField flat = MetricField::schwarzschild(0.0);
  const TransportPath circle = TransportPath::latitude_circle(Chart::spherical, 3.0, 1.0);
  const CutReport c = cut_detection(circle, flat, 1e-6, 4000);
  EXPECT_LE(c.deviation, 1e-8);
  EXPECT_FALSE(c.cut);
}

class SchwarzschildCircle : public ::testing::TestWithParam<double> {};

TEST_P(SchwarzschildCircle, FullModeAngleIsTwoPiCosTheta) {
  const double th = GetParam(), r = 10.0;
  const HolonomyResult h = holonomy(TransportPath::latitude_circle(Chart::spherical, r, th), kSchw,
                                    TransportMode::full);
  EXPECT_LE(std::abs(wrap_angle(h.rotation_angle - 2 * kPi * std::cos(th))), 1e-6);
  const double s = std::sqrt(std::pow(std::cos(th), 2) + (1 - 2.0 / r) * std::pow(std::sin(th), 2));
  EXPECT_NEAR(h.spatial_rotation_angle, std::abs(wrap_angle(2 * kPi * s)), 1e-6);
  EXPECT_TRUE(cut_detection(TransportPath::latitude_circle(Chart::spherical, r, th), kSchw).cut);
}

TEST_P(SchwarzschildCircle, PaperModeAngleIsMinusTwoPiCosTheta) {
  const double th = GetParam();
  const HolonomyResult h = holonomy(TransportPath::latitude_circle(Chart::spherical, 10.0, th), kSchw,
                                    TransportMode::paper);
  EXPECT_LE(std::abs(wrap_angle(h.rotation_angle + 2 * kPi * std::cos(th))), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Latitudes, SchwarzschildCircle, ::testing::Values(0.4, 0.9, kPi / 3, 2.2));

TEST(Holonomy, OrbitSphereMatchesIntrinsicDeficit) {
  const MetricField m = MetricField::orbit_sphere(2.0);
  const double th = 0.7;
  const HolonomyResult h = holonomy(TransportPath::latitude_circle(Chart::orbit_sphere, 0.0, th), m,
                                    TransportMode::full);
  EXPECT_LE(std::abs(wrap_angle(h.rotation_angle - 2 * kPi * std::cos(th))), 1e-6);
}

TEST(WrapAngle, Range) {
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(-3 * kPi / 2), kPi / 2, 1e-15);
  for (int i = 0; i < 100; ++i) {
    const double w = wrap_angle(uniform(-50, 50));
    EXPECT_GT(w, -kPi - 1e-15);
    EXPECT_LE(w, kPi + 1e-15);
  }
}

TEST(Paths, ConcatenateRejectsGap) {
  const TransportPath a = TransportPath::latitude_circle(Chart::spherical, 5, 1.0, 0.0, 0.25);
  const TransportPath b = TransportPath::latitude_circle(Chart::spherical, 6, 1.0, 0.0, 0.25);
  EXPECT_THROW(TransportPath::concatenate(a, b), UsageError);
}

TEST(Paths, FromSamplesReproducesPolynomial) {
  std::vector<Vec4> x, v;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.1 * i;
    x.push_back(Vec4(t, t * t, t * t * t, 1.0));
    v.push_back(Vec4(1, 2 * t, 3 * t * t, 0));
  }
  const TransportPath p = TransportPath::from_samples(x, v, Chart::cartesian, 0.1);
  const Vec4 mid = p.curve(0.37).coords;
  EXPECT_NEAR(mid(2), std::pow(0.37, 3), 1e-12);
  EXPECT_FALSE(p.closed);
}

TEST(GeodesicTransport, KeepsFrameOrthonormal) {
  const double r = 8.0;
  const SpacetimePoint start{Vec4(0, r, kPi / 2, 0), Chart::spherical};
  const Vec4 u(1.0 / std::sqrt(1 - 3.0 / r), 0, 0, std::sqrt(1.0 / (r * r * r)) / std::sqrt(1 - 3.0 / r));
  const std::array<Vec4, 2> vecs{u, Vec4(0, std::sqrt(1 - 2.0 / r), 0, 0)};
  const GeodesicTransport g = transport_along_geodesic(kSchw, start, u, vecs, 20.0, 2000);
  ASSERT_FALSE(g.truncated);
  const Vec4& x = g.positions.back();
  const auto& v = g.transported.back();
  EXPECT_NEAR(inner(kSchw, x, v[0], v[0]), -1.0, 1e-9);
  EXPECT_NEAR(inner(kSchw, x, v[1], v[1]), 1.0, 1e-9);
  EXPECT_NEAR(inner(kSchw, x, v[0], v[1]), 0.0, 1e-9);
}

TEST(GeodesicFan, RejectsNonUnitInducingVector) {
  const SpacetimePoint p{Vec4(0, 8, kPi / 2, 0), Chart::spherical};
  const std::array<Vec4, 1> dirs{Vec4(0, 1, 0, 0)};
  EXPECT_THROW(geodesic_fan(p, Vec4(1, 0, 0, 0), dirs, kSchw, 1.0, 10), InvariantError);
}

TEST(Coverage, AssignsEveryPointOrReportsHoles) {
  const double f = 1 - 2.0 / 8.0;
  const SampleGrid grid = SampleGrid::rectangular({Vec4(0, 6, kPi / 2, 0), Chart::spherical}, 1, 3, 5, 5,
                                                  1.0, 0.2, 1.5);
  FanSeed seed;
  seed.point = {Vec4(0, 8, kPi / 2, 0.4), Chart::spherical};
  seed.n = Vec4(1 / std::sqrt(f), 0, 0, 0);
  for (int k = 0; k < 24; ++k) {
    const double a = 2 * kPi * k / 24;
    seed.directions.push_back(Vec4(0, std::cos(a) * std::sqrt(f), 0, std::sin(a) / 8.0));
  }
  seed.length = 6.0;
  seed.steps = 200;
  const SpinEnsembleChart chart = coverage_classes(grid, std::vector<FanSeed>{seed}, kSchw);
  ASSERT_EQ(chart.assignment.size(), grid.points.size());
  for (int a : chart.assignment) EXPECT_EQ(a, 0);
  EXPECT_TRUE(chart.boundary_pairs.empty());

  FanSeed tiny = seed;
  tiny.length = 0.1;
  EXPECT_THROW(coverage_classes(grid, std::vector<FanSeed>{tiny}, kSchw), IncompleteCoverError);
}
