#pragma once

// Dirac matrices, the covariant Pauli tensors Sigma_N relative to a timelike
// inducing vector N, the K^mu / K_L / K_T operators and the spin coupled
// Hamiltonian matrix.
//
// Index placement: gamma[mu] is gamma^mu (upper index).  Covariant objects
// are obtained with eta = diag(-1, 1, 1, 1).  The matrices are the
// Bjorken-Drell (Dirac representation) matrices, for which
//   {gamma^mu, gamma^nu} = -2 eta^{mu nu},  (gamma.N)^2 = +1,
//   (gamma5)^2 = +1.
// This is the normalization under which Sigma_N reduces to the Pauli
// matrices in the rest frame and [K^mu, K^nu] = -i Sigma_N^{mu nu}.

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>

#include "shpgr/geometry.hpp"

namespace shpgr {

using Mat4c = Eigen::Matrix4cd;
using Mat2c = Eigen::Matrix2cd;

// Minkowski metric diag(-1, 1, 1, 1).
Mat4 eta();

struct CliffordConvention {
  // {gamma^mu, gamma^nu} = 2 * anticommutator_sign * eta^{mu nu}
  int anticommutator_sign = -1;
  std::string name;
};

struct GammaBasis {
  std::array<Mat4c, 4> gamma;
  Mat4c gamma5;
  CliffordConvention signature_convention;

  Mat4c lower(int mu) const;                 // gamma_mu
  Mat4c slash(const Vec4& contravariant) const;       // gamma_mu v^mu
  Mat4c slash_covariant(const Vec4& covariant) const; // gamma^mu p_mu
};

GammaBasis build_gammas();

// Sigma^{mu nu} = (i/4)[gamma^mu, gamma^nu]
struct SigmaTensor {
  std::array<std::array<Mat4c, 4>, 4> sigma;

  const Mat4c& operator()(int mu, int nu) const { return sigma[mu][nu]; }
  static SigmaTensor from(const GammaBasis& basis);
};

struct InducingVector {
  Vec4 N = Vec4(1, 0, 0, 0);  // contravariant
  bool upper_cone = true;

  // Throws InvariantError unless eta(N, N) = -1 to 1e-12.
  static InducingVector make(const Vec4& n);
  Vec4 lowered() const;
};

struct SigmaN {
  std::array<std::array<Mat4c, 4>, 4> sigma_N;
  std::array<Mat4c, 4> k_vec;  // K^mu = Sigma^{mu nu} N_nu
  Mat4 projector;              // pi^{mu nu} = eta^{mu nu} + N^mu N^nu
  std::array<Mat4c, 4> gamma_N;  // gamma_N^mu = gamma_l pi^{l mu}

  // (i/4)[gamma_N^mu, gamma_N^nu]
  Mat4c projected_construction(int mu, int nu) const;
};

SigmaN sigma_N_build(const InducingVector& n, const GammaBasis& basis);

struct AlgebraResidual {
  double kk = 0.0;  // [K^mu, K^nu] + i Sigma_N^{mu nu}
  double sk = 0.0;  // [Sigma_N^{mu nu}, K^l]
  double ss = 0.0;  // [Sigma_N^{mu nu}, Sigma_N^{l s}]

  double max() const;
};

// Closure of the algebra with the projected metric pi:
//   [K^m, K^n]           = -i Sigma_N^{mn}
//   [Sigma_N^{mn}, K^l]  = -i (pi^{nl} K^m - pi^{ml} K^n)
//   [Sigma_N^{mn}, Sigma_N^{ls}] = -i (pi^{nl} Sigma_N^{ms}
//        - pi^{ml} Sigma_N^{ns} - pi^{ns} Sigma_N^{ml} + pi^{ms} Sigma_N^{nl})
// Residuals are max absolute entries over all index combinations.
AlgebraResidual verify_lorentz_algebra(const InducingVector& n,
                                       const GammaBasis& basis);

struct KOperators {
  Mat4c K_L;
  Mat4c K_T;
};

// K_L = -(p.N) gamma.N,  K_T = -2i gamma5 (p.K) gamma.N, p covariant.
KOperators k_operators(const Vec4& p, const InducingVector& n,
                       const GammaBasis& basis);

// Throws UsageError unless F + F^T = 0 to 1e-12.
void check_antisymmetric(const Mat4& f);

// F_N{mu nu} = P_mu^a P_nu^b F_{ab} with P_mu^a = delta_mu^a + N_mu N^a.
Mat4 project_field(const Mat4& f_lower, const InducingVector& n);

// (1/2M) eta^{mn}(p - eA)_m (p - eA)_n + (e/2M) Sigma_N^{mn} F_{mn}
// with p, A covariant and F_{mn} lower indices.
Mat4c spin_em_hamiltonian(const Vec4& p, const Vec4& a, const Mat4& f_lower,
                          double e, double mass, const InducingVector& n,
                          const GammaBasis& basis);

// -i e gamma5 (K^m N^n - K^n N^m) F_{mn}
Mat4c dipole_commutator(const InducingVector& n, const Mat4& f_lower,
                        double e, const GammaBasis& basis);

// Rank of a set of matrices viewed as vectors in C^16.
int matrix_rank(std::span<const Mat4c> matrices, double tol = 1e-10);

// Pauli matrices sigma_1..3 (index 0 -> sigma_1).
const std::array<Mat2c, 3>& pauli();

double max_abs(const Mat4c& m);

}  // namespace shpgr
