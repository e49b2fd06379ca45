#include <gtest/gtest.h>

#include "shpgr/induced_rep.hpp"
#include "support.hpp"

using namespace shpgr;
using shpgr::test::kPi;
using shpgr::test::random_lorentz;
using shpgr::test::random_spinor;
using shpgr::test::random_timelike;
using shpgr::test::uniform;

namespace {

const GammaBasis kBasis = build_gammas();

double max_abs2(const Mat2c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Lorentz, FactoriesPreserveEta) {
  const Mat4 g = eta();
  for (int i = 0; i < 20; ++i) {
    const LorentzTransform l = random_lorentz();
    EXPECT_LE((l.matrix.transpose() * g * l.matrix - g).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(l.proper_orthochronous);
    EXPECT_LE(((l * l.inverse()).matrix - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(LorentzTransform::make(Mat4::Identity() * 2.0), InvariantError);
}

TEST(SL2C, RoundTripThroughLorentz) {
  for (int i = 0; i < 50; ++i) {
    const LorentzTransform l = random_lorentz();
    const LorentzTransform back = sl2c_to_lorentz(lorentz_to_sl2c(l));
    EXPECT_LE((back.matrix - l.matrix).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_THROW(SL2CElement::make(Mat2c::Identity() * 2.0), UsageError);
}

TEST(SL2C, KnownGenerators) {
  // boost along z by rapidity a maps e0 to (cosh a, 0, 0, sinh a)
  const double a = 0.8;
  const LorentzTransform b = LorentzTransform::boost(a, Eigen::Vector3d::UnitZ());
  EXPECT_NEAR(b.matrix(0, 0), std::cosh(a), 1e-15);
  EXPECT_NEAR(b.matrix(3, 0), std::sinh(a), 1e-15);
  const LorentzTransform r = LorentzTransform::rotation(kPi / 2, Eigen::Vector3d::UnitZ());
  EXPECT_NEAR((r * Vec4(0, 1, 0, 0))(2), 1.0, 1e-15);
}

TEST(Boost, MapsRestToN) {
  for (int i = 0; i < 50; ++i) {
    const bool lower = i % 4 == 3;
    const InducingVector n = InducingVector::make(random_timelike(2.0, lower));
    const BoostPair b = boost_to(n);
    const Vec4 image = sl2c_to_lorentz(b.L).matrix.col(0);
    EXPECT_LE((image - (lower ? Vec4(-n.N) : n.N)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(max_abs2(b.L.matrix - b.L.matrix.adjoint()), 1e-12);
    EXPECT_LE(max_abs2(b.L_second.matrix * b.L.matrix - Mat2c::Identity()), 1e-12);
    const Mat2c rel = b.L.matrix.adjoint().inverse() * b.L.matrix.inverse();
    EXPECT_LE(max_abs2(rel + double(cone_sign(n)) * sigma_contract(n.N)), 1e-10);
  }
}

TEST(WignerD, UnitaryWithUnitDeterminant) {
  for (int i = 0; i < 200; ++i) {
    const InducingVector n = InducingVector::make(random_timelike(2.0, i % 7 == 0));
    const Mat2c d = wigner_d(random_lorentz(), n).matrix;
    EXPECT_LE(max_abs2(d.adjoint() * d - Mat2c::Identity()), 1e-10);
    EXPECT_LE(std::abs(d.determinant() - 1.0), 1e-10);
  }
}

TEST(WignerD, RotationInRestFrameIsItsOwnSU2) {
  const InducingVector rest = InducingVector::make(Vec4(1, 0, 0, 0));
  const LorentzTransform r = LorentzTransform::rotation(0.6, Eigen::Vector3d::UnitZ());
  const Mat2c d = wigner_d(r, rest).matrix;
  EXPECT_LE(max_abs2(d - lorentz_to_sl2c(r).matrix), 1e-12);
}

TEST(WignerD, CocycleUpToSign) {
  for (int i = 0; i < 50; ++i) {
    const InducingVector n = InducingVector::make(random_timelike());
    const LorentzTransform l1 = random_lorentz(), l2 = random_lorentz();
    const InducingVector back{l1.inverse().matrix * n.N, true};
    const Mat2c lhs = wigner_d(l1 * l2, n).matrix;
    const Mat2c rhs = wigner_d(l1, n).matrix * wigner_d(l2, back).matrix;
    EXPECT_LE(std::min(max_abs2(lhs - rhs), max_abs2(lhs + rhs)), 1e-8);
  }
}

TEST(DiracS, IntertwinesGammas) {
  for (int i = 0; i < 50; ++i) {
    const LorentzTransform l = random_lorentz();
    const Mat4c s = dirac_S(l, kBasis);
    for (int m = 0; m < 4; ++m) {
      Mat4c rhs = Mat4c::Zero();
      for (int v = 0; v < 4; ++v) rhs += l.matrix(m, v) * kBasis.gamma[v];
      EXPECT_LE(max_abs(s.inverse() * kBasis.gamma[m] * s - rhs), 1e-9);
    }
    EXPECT_LE(projective_residual(l, random_lorentz(), kBasis), 1e-8);
  }
}

TEST(Covariance, SigmaNTransformsAsTensor) {
  for (int i = 0; i < 200; ++i) {
    const InducingVector n = InducingVector::make(random_timelike(1.5, i % 9 == 0));
    EXPECT_LE(covariance_check(random_lorentz(), n, kBasis), 1e-8);
  }
}

TEST(FourSpinor, SplitInvertsAssemble) {
  for (int i = 0; i < 30; ++i) {
    const InducingVector n = InducingVector::make(random_timelike(2.0, i % 3 == 0));
    const Vec2c a = random_spinor(), b = random_spinor();
    const auto [a2, b2] = split_four_spinor(assemble_four_spinor(a, b, n));
    EXPECT_LE((a2 - a).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((b2 - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(NormForms, SectorNormsAgreeOnRandomFields) {
  for (int trial = 0; trial < 40; ++trial) {
    const InducingVector n = InducingVector::make(random_timelike(2.0, trial % 2 == 1));
    std::vector<Vec4c> psi;
    std::vector<Vec2c> ph, ps;
    std::vector<double> w;
    for (int i = 0; i < 64; ++i) {
      ph.push_back(random_spinor());
      ps.push_back(random_spinor());
      psi.push_back(assemble_four_spinor(ph.back(), ps.back(), n).components);
      w.push_back(uniform(0.1, 2.0));
    }
    const double a = sector_norm_dirac(psi, w, n, cone_sign(n));
    const double b = sector_norm_two_spinor(ph, ps, w);
    EXPECT_GT(b, 0.0);
    EXPECT_LE(std::abs(a - b) / b, 1e-10);
  }
}

TEST(NormForms, RejectsWrongSign) {
  const InducingVector n = InducingVector::make(Vec4(1, 0, 0, 0));
  const std::vector<Vec4c> psi{Vec4c::Ones()};
  const std::vector<double> w{1.0};
  EXPECT_THROW(sector_norm_dirac(psi, w, n, -1), UsageError);
}

TEST(NormForms, VolumeWeightsUseSqrtMinusDetG) {
  const MetricField m = MetricField::schwarzschild(1.0);
  const std::vector<SpacetimePoint> pts{{Vec4(0, 5, 1.0, 0), Chart::spherical}};
  const auto w = volume_weights(pts, m, 0.5);
  EXPECT_NEAR(w[0], 0.5 * 25 * std::sin(1.0), 1e-12);
}

TEST(WaveFunction, IdentityLeavesFieldUnchanged) {
  SpinorGrid g;
  g.dims = {1, 4, 4, 1};
  g.spacing = Vec4(1, 0.5, 0.5, 1);
  g.components = 2;
  for (std::size_t i = 0; i < g.size(); ++i) g.values.push_back(random_spinor());
  const InducingVector n = InducingVector::make(Vec4(1, 0, 0, 0));
  const TransformedField out = transform_wavefunction(g, LorentzTransform::identity(), n, kBasis);
  EXPECT_EQ(out.dropped, 0u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_LE((out.field.values[i] - g.values[i]).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(WaveFunction, RotationActsWithDTranspose) {
  SpinorGrid g;
  g.dims = {1, 1, 1, 1};
  g.components = 2;
  g.values.push_back(Vec2c(1.0, 0.5));
  const InducingVector n = InducingVector::make(Vec4(1, 0, 0, 0));
  const LorentzTransform r = LorentzTransform::rotation(0.7, Eigen::Vector3d::UnitZ());
  const TransformedField out = transform_wavefunction(g, r, n, kBasis);
  const Mat2c d = wigner_d(r, n).matrix;
  EXPECT_LE((out.field.values[0] - d.transpose() * g.values[0]).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Composition, SingletAndTriplet) {
  const Vec2c up(1, 0), down(0, 1);
  const SpinComposition ud = compose_spins(up, down);
  EXPECT_NEAR(std::abs(ud.singlet), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(ud.triplet[1]), 1 / std::sqrt(2.0), 1e-15);
  const SpinComposition uu = compose_spins(up, up);
  EXPECT_NEAR(std::abs(uu.singlet), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(uu.triplet[0]), 1.0, 1e-15);
}
