#pragma once

// Singlet pairs formed at a common inducing vector, geodesic separation
// with parallel-transported frames, and EPR correlations.
//
// Analyzer directions are given in the local reference frame at each
// measurement point: the Gram-Schmidt triad of the chart axes orthogonal to
// the transported N.  They are referred back to the formation frame through
// the leg rotation (R_i)_{kj} = g(transported e_k, reference e_j), so the
// analyzer a has formation-frame components R_1 a.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <random>

#include "shpgr/geometry.hpp"
#include "shpgr/transport.hpp"

namespace shpgr {

struct LocalFrame {
  Vec4 N = Vec4(1, 0, 0, 0);                 // contravariant, g(N, N) = -1
  std::array<Vec4, 3> triad{};               // contravariant, orthonormal
  SpacetimePoint basepoint;
};

// Gram-Schmidt of the chart axes d_1, d_2, d_3 against N under g.  A
// degenerate seed is replaced by the next permutation that includes d_0.
// N is rescaled to g(N, N) = -1; throws InvariantError if N is not timelike.
LocalFrame make_frame(const SpacetimePoint& p, const Vec4& n,
                      const MetricField& metric);

// max of |g(e_a, e_b) - delta_ab|, |g(N, e_a)|, |g(N, N) + 1|
double frame_residual(const LocalFrame& frame, const MetricField& metric);

// Components of a covariant-vector map (e.g. a holonomy matrix) in the
// orthonormal triad of `frame`: M_lk = g(e_l, H e_k).
Eigen::Matrix3d frame_components(const Mat4& covariant_map,
                                 const LocalFrame& frame,
                                 const MetricField& metric);

using SpinState = Eigen::Vector4cd;  // basis uu, ud, du, dd

SpinState singlet_state();

struct EntangledPair {
  SpinState spin_state = singlet_state();
  LocalFrame frame_1;      // transported along leg 1
  LocalFrame frame_2;      // transported along leg 2
  LocalFrame reference_1;  // local reference frame at the end of leg 1
  LocalFrame reference_2;
  Eigen::Matrix3d rotation_1 = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d rotation_2 = Eigen::Matrix3d::Identity();
  SpacetimePoint formation_point;
  std::array<GeodesicTransport, 2> legs;
  double leg_length = 0.0;
  bool truncated = false;

  bool is_singlet(double tol = 1e-12) const;
};

struct AnalyzerDirection {
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();

  // Throws UsageError unless |v| = 1 to 1e-12.
  static AnalyzerDirection make(const Eigen::Vector3d& v);
  // cos(angle) e_a + sin(angle) e_b in the triad.
  static AnalyzerDirection in_plane(double angle, int axis_a = 0,
                                    int axis_b = 1);
};

EntangledPair form_pair(const SpacetimePoint& p, const Vec4& n,
                        const MetricField& metric);

// Transports N and the triad along the geodesics with initial velocities
// u1, u2 (timelike, else UsageError).  Leaving the chart sets `truncated`.
EntangledPair separate(const EntangledPair& pair, const Vec4& u1,
                       const Vec4& u2, double length, int steps,
                       const MetricField& metric);

// The loop leg 2 followed by leg 1 reversed, based at the formation point.
// The legs must end at a common event (UsageError otherwise).
TransportPath separation_loop(const EntangledPair& pair,
                              double closure_tol = 1e-9);

// Map between the two transported frames in formation-frame components:
// R_1 R_2^T, equal to the holonomy of separation_loop in the same basis.
Eigen::Matrix3d relative_frame_map(const EntangledPair& pair);

// <psi| (sigma.a') (x) (sigma.b') |psi> with a' = R_1 a, b' = R_2 b.
double correlation(const EntangledPair& pair, const AnalyzerDirection& a,
                   const AnalyzerDirection& b);

struct Outcome {
  int s1 = 1;
  int s2 = 1;
};

// Joint outcomes drawn from the quantum probabilities
// P(s1, s2) = <psi| P_a'(s1) (x) P_b'(s2) |psi>.  Deterministic given the
// seed; uses mt19937_64 with a 53-bit mantissa conversion.
class EprSampler {
 public:
  EprSampler(const EntangledPair& pair, const AnalyzerDirection& a,
             const AnalyzerDirection& b, std::uint64_t seed);

  Outcome next();
  const std::array<double, 4>& probabilities() const { return p_; }  // ++ +- -+ --

 private:
  std::array<double, 4> p_{};
  std::mt19937_64 rng_;
};

Outcome epr_outcome_sample(const EntangledPair& pair,
                           const AnalyzerDirection& a,
                           const AnalyzerDirection& b, std::uint64_t seed);

struct SampledCorrelation {
  double mean = 0.0;
  double stderr_ = 0.0;
  long long samples = 0;
};

SampledCorrelation sample_correlation(const EntangledPair& pair,
                                      const AnalyzerDirection& a,
                                      const AnalyzerDirection& b,
                                      long long samples, std::uint64_t seed);

struct ChshResult {
  double exact = 0.0;
  double sampled = 0.0;
  double stderr_ = 0.0;
};

// |E(a,b) - E(a,b2) + E(a2,b) + E(a2,b2)|, each term sampled with
// `samples` draws from seeds seed, seed+1, seed+2, seed+3.
ChshResult chsh(const EntangledPair& pair, const AnalyzerDirection& a,
                const AnalyzerDirection& a2, const AnalyzerDirection& b,
                const AnalyzerDirection& b2, long long samples,
                std::uint64_t seed);

}  // namespace shpgr
