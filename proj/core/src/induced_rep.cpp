#include "shpgr/induced_rep.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>

namespace shpgr {

namespace {

using cd = std::complex<double>;
constexpr cd kI(0.0, 1.0);

Mat4 lorentz_inverse(const Mat4& m) { return eta() * m.transpose() * eta(); }

Mat2c boost_matrix(const Vec4& upper) {
  // (N^0 + N.sigma + 1) / sqrt(2 N^0 + 2): positive square root of the
  // inverse of N^0 - N.sigma.
  Mat2c m = (upper(0) + 1.0) * Mat2c::Identity();
  for (int k = 0; k < 3; ++k) m += upper(k + 1) * pauli()[k];
  return m / std::sqrt(2.0 * upper(0) + 2.0);
}

Mat2c su2_rotation(double angle, const Eigen::Vector3d& axis) {
  Mat2c ns = Mat2c::Zero();
  for (int k = 0; k < 3; ++k) ns += axis(k) * pauli()[k];
  return std::cos(angle / 2.0) * Mat2c::Identity() -
         kI * std::sin(angle / 2.0) * ns;
}

// Generators of the boost and rotation factors of Lambda = B R.
std::pair<Mat4, Mat4> generators(const LorentzTransform& lambda) {
  const Mat4& m = lambda.matrix;
  Mat4 gb = Mat4::Zero();
  const Eigen::Vector3d v = m.block<3, 1>(1, 0);
  const double zeta = std::acosh(std::max(1.0, m(0, 0)));
  if (v.norm() > 0.0) {
    const Eigen::Vector3d n = v.normalized();
    gb.block<1, 3>(0, 1) = zeta * n.transpose();
    gb.block<3, 1>(1, 0) = zeta * n;
  }
  const Mat4 b = gb.exp();
  const Mat4 r = lorentz_inverse(b) * m;
  const Eigen::AngleAxisd aa(Eigen::Matrix3d(r.block<3, 3>(1, 1)));
  Mat4 gr = Mat4::Zero();
  const Eigen::Vector3d w = aa.angle() * aa.axis();
  gr(1, 2) = -w(2);
  gr(1, 3) = w(1);
  gr(2, 1) = w(2);
  gr(2, 3) = -w(0);
  gr(3, 1) = -w(1);
  gr(3, 2) = w(0);
  return {gb, gr};
}

Mat4c spinor_exp(const Mat4& g, const SigmaTensor& sigma) {
  const Mat4 omega = eta() * g;  // omega_{mn}
  Mat4c x = Mat4c::Zero();
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) x += omega(m, n) * sigma(m, n);
  }
  return (0.5 * kI * x).exp();
}

}  // namespace

// ---------------------------------------------------------------------------

LorentzTransform LorentzTransform::make(const Mat4& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m.transpose() * eta() * m - eta()).cwiseAbs().maxCoeff() >
      1e-10 * scale * scale) {
    throw InvariantError("matrix does not preserve eta");
  }
  return {m, m.determinant() > 0.0 && m(0, 0) >= 1.0 - 1e-12};
}

LorentzTransform LorentzTransform::identity() { return {}; }

LorentzTransform LorentzTransform::boost(double rapidity,
                                         const Eigen::Vector3d& axis) {
  if (axis.norm() == 0.0) throw UsageError("boost axis must be nonzero");
  const Eigen::Vector3d n = axis.normalized();
  Mat4 m = Mat4::Identity();
  m(0, 0) = std::cosh(rapidity);
  m.block<1, 3>(0, 1) = std::sinh(rapidity) * n.transpose();
  m.block<3, 1>(1, 0) = std::sinh(rapidity) * n;
  m.block<3, 3>(1, 1) += (std::cosh(rapidity) - 1.0) * n * n.transpose();
  return {m, true};
}

LorentzTransform LorentzTransform::rotation(double angle,
                                            const Eigen::Vector3d& axis) {
  if (axis.norm() == 0.0) throw UsageError("rotation axis must be nonzero");
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(1, 1) = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return {m, true};
}

LorentzTransform LorentzTransform::inverse() const {
  return {lorentz_inverse(matrix), proper_orthochronous};
}

LorentzTransform LorentzTransform::operator*(const LorentzTransform& o) const {
  return {matrix * o.matrix, proper_orthochronous && o.proper_orthochronous};
}

SL2CElement SL2CElement::make(const Mat2c& m, SpinorRep rep) {
  if (std::abs(m.determinant() - 1.0) > 1e-12) {
    throw UsageError("SL(2,C) element must have unit determinant");
  }
  return {m, rep};
}

Mat2c sigma_contract(const Vec4& n, SpinorRep rep) {
  const double s = rep == SpinorRep::first ? 1.0 : -1.0;
  Mat2c x = -n(0) * Mat2c::Identity();
  for (int k = 0; k < 3; ++k) x += s * n(k + 1) * pauli()[k];
  return x;
}

LorentzTransform sl2c_to_lorentz(const SL2CElement& a) {
  if (std::abs(a.matrix.determinant() - 1.0) > 1e-12) {
    throw UsageError("SL(2,C) element must have unit determinant");
  }
  const double s = a.rep == SpinorRep::first ? 1.0 : -1.0;
  Mat4 inv;
  for (int j = 0; j < 4; ++j) {
    const Mat2c x =
        a.matrix.adjoint() * sigma_contract(Vec4::Unit(j), a.rep) * a.matrix;
    inv(0, j) = -0.5 * x.trace().real();
    for (int k = 0; k < 3; ++k) {
      inv(k + 1, j) = s * 0.5 * (x * pauli()[k]).trace().real();
    }
  }
  return {lorentz_inverse(inv), inv(0, 0) >= 1.0 - 1e-12};
}

SL2CElement lorentz_to_sl2c(const LorentzTransform& lambda) {
  if (!lambda.proper_orthochronous) {
    throw UsageError("only proper orthochronous transforms lift to SL(2,C)");
  }
  const Vec4 image = lambda.matrix.col(0);
  const Mat2c l = boost_matrix(image);
  const Mat4 b = sl2c_to_lorentz({l, SpinorRep::first}).matrix;
  const Mat4 r = lorentz_inverse(b) * lambda.matrix;
  const Eigen::AngleAxisd aa(Eigen::Matrix3d(r.block<3, 3>(1, 1)));
  Mat2c a = l * su2_rotation(aa.angle(), aa.axis());
  if (a.trace().real() < 0.0) a = -a;
  return {a, SpinorRep::first};
}

BoostPair boost_to(const InducingVector& n) {
  InducingVector::make(n.N);
  const Vec4 upper = n.upper_cone ? n.N : Vec4(-n.N);
  const Mat2c l = boost_matrix(upper);
  return {{l, SpinorRep::first}, {l.inverse(), SpinorRep::second}};
}

WignerDMatrix wigner_d(const LorentzTransform& lambda,
                       const InducingVector& n) {
  if (!lambda.proper_orthochronous) {
    throw UsageError("Wigner D needs a proper orthochronous transform");
  }
  const Mat2c a = lorentz_to_sl2c(lambda).matrix;
  const InducingVector back{lambda.inverse().matrix * n.N, n.upper_cone};
  return {boost_to(n).L.matrix.inverse() * a * boost_to(back).L.matrix};
}

Spinor4 assemble_four_spinor(const Vec2c& psi_hat, const Vec2c& phi_hat,
                             const InducingVector& n) {
  const BoostPair b = boost_to(n);
  const Vec2c u = b.L_second.matrix * psi_hat;
  const Vec2c d = b.L.matrix * phi_hat;
  Spinor4 s;
  s.inducing = n;
  s.components << (u + d) / std::sqrt(2.0), (d - u) / std::sqrt(2.0);
  return s;
}

std::pair<Vec2c, Vec2c> split_four_spinor(const Spinor4& psi) {
  const BoostPair b = boost_to(psi.inducing);
  const Vec2c top = psi.components.head<2>();
  const Vec2c bottom = psi.components.tail<2>();
  const Vec2c u = (top - bottom) / std::sqrt(2.0);
  const Vec2c d = (top + bottom) / std::sqrt(2.0);
  return {b.L_second.matrix.inverse() * u, b.L.matrix.inverse() * d};
}

int cone_sign(const InducingVector& n) { return n.upper_cone ? 1 : -1; }

double sector_norm_dirac(std::span<const Vec4c> psi,
                         std::span<const double> weights,
                         const InducingVector& n, int sign) {
  if (sign != cone_sign(n)) {
    throw UsageError("sector sign flag does not match the cone of N");
  }
  if (psi.size() != weights.size()) {
    throw UsageError("spinor samples and weights differ in size");
  }
  const GammaBasis basis = build_gammas();
  const Mat4c form = basis.gamma[0] * basis.slash(n.N);
  double total = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    total += weights[i] * (psi[i].adjoint() * form * psi[i])(0).real();
  }
  return -sign * total;
}

double sector_norm_two_spinor(std::span<const Vec2c> psi_hat,
                              std::span<const Vec2c> phi_hat,
                              std::span<const double> weights) {
  if (psi_hat.size() != weights.size() || phi_hat.size() != weights.size()) {
    throw UsageError("spinor samples and weights differ in size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i] * (psi_hat[i].squaredNorm() + phi_hat[i].squaredNorm());
  }
  return total;
}

std::vector<double> volume_weights(std::span<const SpacetimePoint> points,
                                   const MetricField& metric,
                                   double cell_volume) {
  std::vector<double> w;
  w.reserve(points.size());
  for (const SpacetimePoint& p : points) {
    w.push_back(std::sqrt(-metric.components(p.coords).determinant()) *
                cell_volume);
  }
  return w;
}

Mat4c dirac_S(const LorentzTransform& lambda, const GammaBasis& basis) {
  if (!lambda.proper_orthochronous) {
    throw UsageError("S(Lambda) needs a proper orthochronous transform");
  }
  const SigmaTensor sigma = SigmaTensor::from(basis);
  const auto [gb, gr] = generators(lambda);
  return spinor_exp(gb, sigma) * spinor_exp(gr, sigma);
}

double covariance_check(const LorentzTransform& lambda,
                        const InducingVector& n, const GammaBasis& basis) {
  const Mat4c s = dirac_S(lambda, basis);
  const Mat4c si = s.inverse();
  const Mat4 li = lambda.inverse().matrix;
  const SigmaN moved = sigma_N_build(InducingVector::make(lambda.matrix * n.N), basis);
  const SigmaN base = sigma_N_build(n, basis);

  std::array<std::array<Mat4c, 4>, 4> t;
  for (int m = 0; m < 4; ++m) {
    for (int v = 0; v < 4; ++v) t[m][v] = si * moved.sigma_N[m][v] * s;
  }
  double worst = 0.0;
  for (int l = 0; l < 4; ++l) {
    for (int q = 0; q < 4; ++q) {
      Mat4c acc = -base.sigma_N[l][q];
      for (int m = 0; m < 4; ++m) {
        for (int v = 0; v < 4; ++v) acc += li(l, m) * li(q, v) * t[m][v];
      }
      worst = std::max(worst, max_abs(acc));
    }
  }
  return worst;
}

double projective_residual(const LorentzTransform& l1,
                           const LorentzTransform& l2,
                           const GammaBasis& basis) {
  const Mat4c lhs = dirac_S(l1 * l2, basis);
  const Mat4c rhs = dirac_S(l1, basis) * dirac_S(l2, basis);
  return std::min(max_abs(lhs - rhs), max_abs(lhs + rhs));
}

// ---------------------------------------------------------------------------

std::size_t SpinorGrid::size() const {
  return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] * dims[3];
}

std::size_t SpinorGrid::index(const std::array<int, 4>& i) const {
  return ((static_cast<std::size_t>(i[0]) * dims[1] + i[1]) * dims[2] + i[2]) *
             dims[3] +
         i[3];
}

Vec4 SpinorGrid::point(std::size_t flat) const {
  Vec4 x;
  for (int d = 3; d >= 0; --d) {
    x(d) = origin(d) + spacing(d) * static_cast<double>(flat % dims[d]);
    flat /= dims[d];
  }
  return x;
}

bool SpinorGrid::sample(const Vec4& x, Eigen::VectorXcd& out) const {
  std::array<int, 4> lo{};
  std::array<double, 4> frac{};
  for (int d = 0; d < 4; ++d) {
    const double tol = 1e-12 * std::max(1.0, std::abs(origin(d)));
    if (dims[d] == 1) {
      if (std::abs(x(d) - origin(d)) > tol) return false;
      lo[d] = 0;
      frac[d] = 0.0;
      continue;
    }
    const double u = (x(d) - origin(d)) / spacing(d);
    if (u < -1e-12 || u > dims[d] - 1 + 1e-12) return false;
    lo[d] = std::clamp(static_cast<int>(std::floor(u)), 0, dims[d] - 2);
    frac[d] = std::clamp(u - lo[d], 0.0, 1.0);
  }
  out = Eigen::VectorXcd::Zero(components);
  for (int corner = 0; corner < 16; ++corner) {
    double w = 1.0;
    std::array<int, 4> idx = lo;
    for (int d = 0; d < 4; ++d) {
      const bool up = (corner >> d) & 1;
      if (up) {
        if (dims[d] == 1) {
          w = 0.0;
          break;
        }
        ++idx[d];
        w *= frac[d];
      } else {
        w *= 1.0 - frac[d];
      }
    }
    if (w != 0.0) out += w * values[index(idx)];
  }
  return true;
}

TransformedField transform_wavefunction(const SpinorGrid& psi,
                                        const LorentzTransform& lambda,
                                        const InducingVector& n,
                                        const GammaBasis& basis) {
  if (psi.components != 2 && psi.components != 4) {
    throw UsageError("spinor field must have 2 or 4 components");
  }
  if (psi.values.size() != psi.size()) {
    throw UsageError("spinor field value count does not match the grid");
  }
  const Eigen::MatrixXcd m =
      psi.components == 2
          ? Eigen::MatrixXcd(wigner_d(lambda, n).matrix.transpose())
          : Eigen::MatrixXcd(dirac_S(lambda, basis));
  const Mat4 li = lambda.inverse().matrix;

  TransformedField out;
  out.field = psi;
  Eigen::VectorXcd v;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (psi.sample(li * psi.point(i), v)) {
      out.field.values[i] = m * v;
    } else {
      out.field.values[i] = Eigen::VectorXcd::Zero(psi.components);
      ++out.dropped;
    }
  }
  return out;
}

SpinComposition compose_spins(const Vec2c& chi1, const Vec2c& chi2) {
  const double r = 1.0 / std::sqrt(2.0);
  SpinComposition c;
  c.singlet = r * (chi1(0) * chi2(1) - chi1(1) * chi2(0));
  c.triplet[0] = chi1(0) * chi2(0);
  c.triplet[1] = r * (chi1(0) * chi2(1) + chi1(1) * chi2(0));
  c.triplet[2] = chi1(1) * chi2(1);
  return c;
}

}  // namespace shpgr
