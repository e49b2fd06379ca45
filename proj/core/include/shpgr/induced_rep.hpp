#pragma once

// SL(2,C) double cover, canonical boosts L(N), Wigner little-group
// elements, four-spinor assembly, sector norms and covariance checks.
//
// sigma^mu = (1, sigma_1, sigma_2, sigma_3) for the first representation,
// (1, -sigma_1, -sigma_2, -sigma_3) for the second.  An SL(2,C) element A
// determines Lambda through
//   A^dagger (sigma^mu N_mu) A = sigma^mu (Lambda^{-1} N)_mu,
// which makes A -> Lambda a homomorphism.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "shpgr/geometry.hpp"
#include "shpgr/spin_algebra.hpp"

namespace shpgr {

using Vec2c = Eigen::Vector2cd;
using Vec4c = Eigen::Vector4cd;

struct LorentzTransform {
  Mat4 matrix = Mat4::Identity();  // Lambda^mu_nu
  bool proper_orthochronous = true;

  // Throws InvariantError unless Lambda^T eta Lambda = eta (1e-10 relative).
  static LorentzTransform make(const Mat4& m);
  static LorentzTransform identity();
  // Pure boost with rapidity along the unit spatial direction `axis`:
  // maps (1,0,0,0) to (cosh, sinh * axis).
  static LorentzTransform boost(double rapidity, const Eigen::Vector3d& axis);
  // Right-handed rotation by `angle` about `axis`.
  static LorentzTransform rotation(double angle, const Eigen::Vector3d& axis);

  LorentzTransform inverse() const;
  LorentzTransform operator*(const LorentzTransform& other) const;
  Vec4 operator*(const Vec4& v) const { return matrix * v; }
};

enum class SpinorRep { first, second };

struct SL2CElement {
  Mat2c matrix = Mat2c::Identity();
  SpinorRep rep = SpinorRep::first;

  // Throws UsageError unless |det - 1| <= 1e-12.
  static SL2CElement make(const Mat2c& m, SpinorRep rep = SpinorRep::first);
};

struct WignerDMatrix {
  Mat2c matrix = Mat2c::Identity();
};

struct Spinor4 {
  Vec4c components = Vec4c::Zero();
  InducingVector inducing;
};

// sigma^mu N_mu for the chosen representation.
Mat2c sigma_contract(const Vec4& n, SpinorRep rep = SpinorRep::first);

LorentzTransform sl2c_to_lorentz(const SL2CElement& a);
// Trace-positive branch of the preimage (pure boost times SU(2)).
SL2CElement lorentz_to_sl2c(const LorentzTransform& lambda);

struct BoostPair {
  SL2CElement L;         // first representation
  SL2CElement L_second;  // second representation, equal to L^{-1}
};

// Positive Hermitian L with sl2c_to_lorentz(L) (1,0,0,0) = N for the upper
// cone.  For the lower cone L(-N) is returned, so that
// L^{dagger -1} L^{-1} = -/+ sigma^mu N_mu.  Throws InvariantError for
// non-timelike N.
BoostPair boost_to(const InducingVector& n);

// D = L^{-1}(N) A L(Lambda^{-1} N), A = lorentz_to_sl2c(Lambda).
// Throws UsageError unless Lambda is proper orthochronous.
WignerDMatrix wigner_d(const LorentzTransform& lambda, const InducingVector& n);

// top = (Ls psi + L phi)/sqrt2, bottom = (-Ls psi + L phi)/sqrt2 with
// Ls = L^{-1} the second-representation boost.  With this placement
// -psibar (gamma.N) psi = |psi|^2 + |phi|^2 for the Dirac matrices used here.
Spinor4 assemble_four_spinor(const Vec2c& psi_hat, const Vec2c& phi_hat,
                             const InducingVector& n);
// Inverse of assemble_four_spinor: returns (psi_hat, phi_hat).
std::pair<Vec2c, Vec2c> split_four_spinor(const Spinor4& psi);

// Overall sign of the sector norm: +1 for the upper cone, -1 for the lower.
int cone_sign(const InducingVector& n);

// -(cone) sum_i w_i psibar_i (gamma.N) psi_i with psibar = psi^dagger gamma^0.
// Throws UsageError if `sign` does not match the cone of N or the sizes of
// psi and weights differ.
double sector_norm_dirac(std::span<const Vec4c> psi,
                         std::span<const double> weights,
                         const InducingVector& n, int sign);
// sum_i w_i (|psi_hat_i|^2 + |phi_hat_i|^2)
double sector_norm_two_spinor(std::span<const Vec2c> psi_hat,
                              std::span<const Vec2c> phi_hat,
                              std::span<const double> weights);

// sqrt(-det g) * cell_volume at each point.
std::vector<double> volume_weights(std::span<const SpacetimePoint> points,
                                   const MetricField& metric,
                                   double cell_volume);

// Dirac-space image S(Lambda) = exp((i/2) w_{mn} Sigma^{mn}) built from the
// boost and rotation generators of Lambda; S^{-1} gamma^m S = Lambda^m_n gamma^n.
Mat4c dirac_S(const LorentzTransform& lambda, const GammaBasis& basis);

// max over (l, s) of |(Lambda^{-1})^l_m (Lambda^{-1})^s_n S^{-1}
// Sigma_{Lambda N}^{mn} S - Sigma_N^{ls}|
double covariance_check(const LorentzTransform& lambda,
                        const InducingVector& n, const GammaBasis& basis);

// min over the sign of |S(L1 L2) -/+ S(L1) S(L2)|
double projective_residual(const LorentzTransform& l1,
                           const LorentzTransform& l2,
                           const GammaBasis& basis);

// A spinor field on a regular grid in (x^0..x^3).  Axes with a single
// sample are degenerate: points must match that coordinate exactly.
struct SpinorGrid {
  Vec4 origin = Vec4::Zero();
  Vec4 spacing = Vec4::Ones();
  std::array<int, 4> dims{1, 1, 1, 1};
  int components = 2;  // 2 (two-spinor) or 4 (Dirac)
  std::vector<Eigen::VectorXcd> values;

  std::size_t size() const;
  std::size_t index(const std::array<int, 4>& i) const;
  Vec4 point(std::size_t flat) const;
  // Multilinear interpolation; false when x lies outside the grid.
  bool sample(const Vec4& x, Eigen::VectorXcd& out) const;
};

struct TransformedField {
  SpinorGrid field;
  std::size_t dropped = 0;  // points whose preimage left the grid (set to 0)
};

// psi'(x) = M psi(Lambda^{-1} x) with M = D^T (two-spinor, D = wigner_d,
// psi'_s = sum psi_s' D_{s' s}) or M = S(Lambda) (Dirac).
TransformedField transform_wavefunction(const SpinorGrid& psi,
                                        const LorentzTransform& lambda,
                                        const InducingVector& n,
                                        const GammaBasis& basis);

struct SpinComposition {
  std::complex<double> singlet;
  std::array<std::complex<double>, 3> triplet;  // m = +1, 0, -1
};

SpinComposition compose_spins(const Vec2c& chi1, const Vec2c& chi2);

}  // namespace shpgr
