#pragma once

// Metrics, connections and index gymnastics on a 4-dimensional chart,
// plus diffeomorphism pullbacks and numerical Poisson-bracket checks.
//
// Signature convention is (-,+,+,+) throughout.  A Christoffel tensor is
// stored as four 4x4 matrices, `values[l](m, n)` = Gamma^l_{mn}.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "shpgr/errors.hpp"

namespace shpgr {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Connection = std::array<Mat4, 4>;

// Coordinate labels for the supported charts.
//   cartesian    (t, x, y, z)
//   spherical    (t, r, theta, phi)   -- Schwarzschild and flat spherical
//   orbit_sphere (t, rho, theta, phi) -- R x R x S^2(radius)
enum class Chart { cartesian, spherical, orbit_sphere };

std::string_view chart_name(Chart chart);

struct SpacetimePoint {
  Vec4 coords = Vec4::Zero();
  Chart chart = Chart::cartesian;
};

enum class Variance { contravariant, covariant };

struct FourVector {
  Vec4 components = Vec4::Zero();
  Variance variance = Variance::contravariant;
  SpacetimePoint base;
};

struct ChristoffelTensor {
  Connection values;
  SpacetimePoint base;

  double operator()(int l, int m, int n) const { return values[l](m, n); }
};

enum class ChristoffelMode { analytic, finite_difference };

// Domain guard margin for coordinate singularities (r = 2M, theta = 0, pi).
inline constexpr double kDomainEpsilon = 1e-9;

// A smooth invertible map x -> xi between charts.  The Jacobian is
// d xi^mu / d x^lambda with mu the row index.
struct Diffeomorphism {
  std::string name;
  Chart source_chart = Chart::cartesian;
  Chart target_chart = Chart::cartesian;
  std::function<Vec4(const Vec4&)> forward;
  std::function<Mat4(const Vec4&)> jacobian;
  // Optional closed forms; numerical fallbacks are used when empty.
  std::function<Mat4(const Vec4&)> inverse_jacobian_fn;
  std::function<Vec4(const Vec4&)> inverse_fn;

  Mat4 inverse_jacobian(const Vec4& x) const;
  // Solves forward(x) = xi; Newton from `guess` when no closed form exists.
  Vec4 inverse(const Vec4& xi, const Vec4& guess) const;

  static Diffeomorphism identity();
  // (t, r, theta, phi) -> (t, x, y, z)
  static Diffeomorphism spherical_to_cartesian();
  // xi^i = x^i + s * sin(x^{i+1}) (cyclic over the spatial indices),
  // xi^0 = x^0 + s * sin(x^1) * 0.5.  Invertible for |s| < 1/2.
  static Diffeomorphism smooth_test_map(double strength = 0.1);
  // outer o inner
  static Diffeomorphism compose(const Diffeomorphism& outer,
                                const Diffeomorphism& inner);
};

class MetricField {
 public:
  using Evaluator = std::function<Mat4(const Vec4&)>;
  using ConnectionEvaluator = std::function<Connection(const Vec4&)>;
  using DomainCheck = std::function<void(const Vec4&)>;

  static MetricField minkowski();
  // Schwarzschild in (t, r, theta, phi).  mass = 0 gives flat space in
  // spherical coordinates.
  static MetricField schwarzschild(double mass);
  // diag(-1, 1, R^2, R^2 sin^2 theta): the orbit sphere of radius R with a
  // flat time and a flat transverse direction.
  static MetricField orbit_sphere(double radius);
  static MetricField custom(std::string name, Chart chart, Evaluator g,
                            DomainCheck domain = {});
  // g_x = J^T g_target(phi(x)) J.
  static MetricField pullback(const MetricField& target,
                              const Diffeomorphism& phi);

  const std::string& name() const { return name_; }
  Chart chart() const { return chart_; }
  ChristoffelMode christoffel_mode() const { return mode_; }
  const std::vector<double>& parameters() const { return parameters_; }
  bool has_analytic_connection() const { return static_cast<bool>(analytic_); }
  bool has_reduced_connection() const { return static_cast<bool>(reduced_); }

  // Throws UsageError when asking for analytic mode without a formula.
  MetricField with_mode(ChristoffelMode mode) const;

  void check_domain(const Vec4& x) const;
  // Domain-checked components; no signature check (see metric_at).
  Mat4 components(const Vec4& x) const;
  Mat4 inverse(const Vec4& x) const;
  Connection connection(const Vec4& x) const;
  // The component subset used by the reduced transport system; equals
  // connection() for metrics without one.
  Connection reduced_connection(const Vec4& x) const;

  // Finite-difference step for coordinate `index` at `x`.
  static double fd_step(const Vec4& x, int index);

 private:
  Connection fd_connection(const Vec4& x) const;

  std::string name_;
  Chart chart_ = Chart::cartesian;
  ChristoffelMode mode_ = ChristoffelMode::finite_difference;
  std::vector<double> parameters_;
  Evaluator evaluator_;
  DomainCheck domain_;
  ConnectionEvaluator analytic_;
  ConnectionEvaluator reduced_;
};

// Number of negative and positive eigenvalues of a symmetric 4x4 matrix.
struct SignatureCount {
  int negative = 0;
  int positive = 0;
  int zero = 0;
};
SignatureCount signature_of(const Mat4& g, double zero_tol = 1e-12);
bool is_lorentzian(const Mat4& g);

// g_{mu nu} at x, validated: symmetric and (-,+,+,+).
Mat4 metric_at(const MetricField& metric, const SpacetimePoint& x);
ChristoffelTensor christoffel_at(const MetricField& metric,
                                 const SpacetimePoint& x);

FourVector raise_index(const FourVector& v, const MetricField& metric);
FourVector lower_index(const FourVector& v, const MetricField& metric);

// g_{mu nu} a^mu b^nu for contravariant components at x.
double inner(const MetricField& metric, const Vec4& x, const Vec4& a,
             const Vec4& b);
// g^{mu nu} a_mu b_nu for covariant components at x.
double inner_covariant(const MetricField& metric, const Vec4& x,
                       const Vec4& a, const Vec4& b);

// Euclidean position used for "nearby" tests: spatial chart coordinates
// mapped to Cartesian-like (x, y, z).
Eigen::Vector3d spatial_embedding(const SpacetimePoint& p);

// ---------------------------------------------------------------------------
// Poisson brackets on the extended phase space (xi, n | pi, m).

struct ExtendedPhasePoint {
  Eigen::Matrix<double, 8, 1> zeta = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 1> eta = Eigen::Matrix<double, 8, 1>::Zero();
};

using PhaseFunction = std::function<double(const ExtendedPhasePoint&)>;

// Canonical coordinate functions: zeta(a) returns zeta[a], eta(a) eta[a].
PhaseFunction zeta_coordinate(int a);
PhaseFunction eta_coordinate(int a);

// [A, B] = sum_a dA/dzeta^a dB/deta_a - dA/deta_a dB/dzeta^a, central
// differences with step h.
double poisson_bracket(const PhaseFunction& a, const PhaseFunction& b,
                       const ExtendedPhasePoint& z, double h = 1e-5);

// Maps a point of the manifold frame (x, N | p, M) to the flat frame
// (xi, n | pi, m).  The extended sector uses the Jacobian frozen at
// `linearization_point`.
ExtendedPhasePoint to_flat_frame(const Diffeomorphism& phi,
                                 const ExtendedPhasePoint& manifold,
                                 const Vec4& linearization_point);

struct BracketComparison {
  double flat_frame = 0.0;
  double manifold_frame = 0.0;
  double residual = 0.0;
};

// Compares [A, B] evaluated at z (flat frame) with [A o phi, B o phi]
// evaluated at phi^{-1}(z).  `guess` seeds the Newton inverse when the map
// has no closed-form inverse.
BracketComparison poisson_bracket_invariance(const Diffeomorphism& phi,
                                             const PhaseFunction& a,
                                             const PhaseFunction& b,
                                             const ExtendedPhasePoint& z,
                                             const Vec4& guess,
                                             double h = 1e-5);

}  // namespace shpgr
