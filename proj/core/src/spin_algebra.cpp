#include "shpgr/spin_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace shpgr {

namespace {

using cd = std::complex<double>;
constexpr cd kI(0.0, 1.0);

Mat4c block(const Mat2c& a, const Mat2c& b, const Mat2c& c, const Mat2c& d) {
  Mat4c m;
  m << a, b, c, d;
  return m;
}

Mat4c commutator(const Mat4c& a, const Mat4c& b) { return a * b - b * a; }

}  // namespace

Mat4 eta() { return Eigen::Vector4d(-1, 1, 1, 1).asDiagonal(); }

const std::array<Mat2c, 3>& pauli() {
  static const std::array<Mat2c, 3> s = [] {
    std::array<Mat2c, 3> out;
    out[0] << 0, 1, 1, 0;
    out[1] << 0, -kI, kI, 0;
    out[2] << 1, 0, 0, -1;
    return out;
  }();
  return s;
}

double max_abs(const Mat4c& m) { return m.cwiseAbs().maxCoeff(); }

Mat4c GammaBasis::lower(int mu) const {
  return mu == 0 ? Mat4c(-gamma[0]) : gamma[mu];
}

Mat4c GammaBasis::slash(const Vec4& v) const {
  Mat4c m = Mat4c::Zero();
  for (int mu = 0; mu < 4; ++mu) m += lower(mu) * v(mu);
  return m;
}

Mat4c GammaBasis::slash_covariant(const Vec4& p) const {
  Mat4c m = Mat4c::Zero();
  for (int mu = 0; mu < 4; ++mu) m += gamma[mu] * p(mu);
  return m;
}

GammaBasis build_gammas() {
  const Mat2c id = Mat2c::Identity();
  const Mat2c zero = Mat2c::Zero();
  GammaBasis b;
  b.gamma[0] = block(id, zero, zero, -id);
  for (int k = 0; k < 3; ++k) {
    b.gamma[k + 1] = block(zero, pauli()[k], -pauli()[k], zero);
  }
  b.gamma5 = kI * b.gamma[0] * b.gamma[1] * b.gamma[2] * b.gamma[3];
  b.signature_convention = {-1, "Bjorken-Drell Dirac representation, eta=(-+++)"};
  return b;
}

SigmaTensor SigmaTensor::from(const GammaBasis& basis) {
  SigmaTensor s;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      s.sigma[m][n] = 0.25 * kI * commutator(basis.gamma[m], basis.gamma[n]);
    }
  }
  return s;
}

InducingVector InducingVector::make(const Vec4& n) {
  const double norm = n.dot(eta() * n);
  if (!std::isfinite(norm) || std::abs(norm + 1.0) > 1e-12) {
    throw InvariantError("inducing vector must satisfy eta(N, N) = -1");
  }
  return {n, n(0) > 0.0};
}

Vec4 InducingVector::lowered() const { return eta() * N; }

Mat4c SigmaN::projected_construction(int mu, int nu) const {
  return 0.25 * kI * commutator(gamma_N[mu], gamma_N[nu]);
}

SigmaN sigma_N_build(const InducingVector& n, const GammaBasis& basis) {
  InducingVector::make(n.N);
  const SigmaTensor sigma = SigmaTensor::from(basis);
  const Vec4 nl = n.lowered();

  SigmaN out;
  for (int m = 0; m < 4; ++m) {
    out.k_vec[m] = Mat4c::Zero();
    for (int v = 0; v < 4; ++v) out.k_vec[m] += sigma(m, v) * nl(v);
  }
  for (int m = 0; m < 4; ++m) {
    for (int v = 0; v < 4; ++v) {
      out.sigma_N[m][v] =
          sigma(m, v) + out.k_vec[m] * n.N(v) - out.k_vec[v] * n.N(m);
    }
  }
  out.projector = eta() + n.N * n.N.transpose();
  for (int m = 0; m < 4; ++m) {
    out.gamma_N[m] = Mat4c::Zero();
    for (int l = 0; l < 4; ++l) {
      out.gamma_N[m] += basis.lower(l) * out.projector(l, m);
    }
  }
  return out;
}

double AlgebraResidual::max() const { return std::max({kk, sk, ss}); }

AlgebraResidual verify_lorentz_algebra(const InducingVector& n,
                                       const GammaBasis& basis) {
  const SigmaN s = sigma_N_build(n, basis);
  const Mat4& pi = s.projector;
  const auto& K = s.k_vec;
  const auto& S = s.sigma_N;

  AlgebraResidual r;
  for (int m = 0; m < 4; ++m) {
    for (int v = 0; v < 4; ++v) {
      r.kk = std::max(r.kk, max_abs(commutator(K[m], K[v]) + kI * S[m][v]));
      for (int l = 0; l < 4; ++l) {
        const Mat4c rhs = -kI * (pi(v, l) * K[m] - pi(m, l) * K[v]);
        r.sk = std::max(r.sk, max_abs(commutator(S[m][v], K[l]) - rhs));
        for (int q = 0; q < 4; ++q) {
          const Mat4c rhs2 =
              -kI * (pi(v, l) * S[m][q] - pi(m, l) * S[v][q] -
                     pi(v, q) * S[m][l] + pi(m, q) * S[v][l]);
          r.ss = std::max(r.ss, max_abs(commutator(S[m][v], S[l][q]) - rhs2));
        }
      }
    }
  }
  return r;
}

KOperators k_operators(const Vec4& p, const InducingVector& n,
                       const GammaBasis& basis) {
  const SigmaN s = sigma_N_build(n, basis);
  const Mat4c gn = basis.slash(n.N);
  Mat4c pk = Mat4c::Zero();
  for (int m = 0; m < 4; ++m) pk += p(m) * s.k_vec[m];
  const double pn = p.dot(n.N);
  return {-pn * gn, -2.0 * kI * basis.gamma5 * pk * gn};
}

void check_antisymmetric(const Mat4& f) {
  if ((f + f.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw UsageError("field tensor must be antisymmetric");
  }
}

Mat4 project_field(const Mat4& f_lower, const InducingVector& n) {
  const Mat4 p = Mat4::Identity() + n.lowered() * n.N.transpose();
  return p * f_lower * p.transpose();
}

Mat4c spin_em_hamiltonian(const Vec4& p, const Vec4& a, const Mat4& f_lower,
                          double e, double mass, const InducingVector& n,
                          const GammaBasis& basis) {
  check_antisymmetric(f_lower);
  if (!(mass > 0.0)) throw UsageError("mass must be positive");
  const SigmaN s = sigma_N_build(n, basis);
  const Vec4 pi = p - e * a;
  Mat4c k = Mat4c::Identity() * (pi.dot(eta() * pi) / (2.0 * mass));
  for (int m = 0; m < 4; ++m) {
    for (int v = 0; v < 4; ++v) {
      k += (e / (2.0 * mass)) * f_lower(m, v) * s.sigma_N[m][v];
    }
  }
  return k;
}

Mat4c dipole_commutator(const InducingVector& n, const Mat4& f_lower,
                        double e, const GammaBasis& basis) {
  check_antisymmetric(f_lower);
  const SigmaN s = sigma_N_build(n, basis);
  Mat4c sum = Mat4c::Zero();
  for (int m = 0; m < 4; ++m) {
    for (int v = 0; v < 4; ++v) {
      sum += (s.k_vec[m] * n.N(v) - s.k_vec[v] * n.N(m)) * f_lower(m, v);
    }
  }
  return -kI * e * basis.gamma5 * sum;
}

int matrix_rank(std::span<const Mat4c> matrices, double tol) {
  if (matrices.empty()) return 0;
  Eigen::MatrixXcd a(16, static_cast<Eigen::Index>(matrices.size()));
  for (std::size_t j = 0; j < matrices.size(); ++j) {
    a.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::Matrix<cd, 16, 1>>(matrices[j].data());
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

}  // namespace shpgr
