#pragma once

// Discretized evolution i d psi/d tau = K psi on a periodic 1+1 (t, x)
// lattice with the sqrt(g)-weighted inner product.
//
// The momentum operator p_mu = -i d_mu - (i/2) (d_mu sqrt g)/sqrt g equals
// W^{-1/2} (-i d_mu) W^{1/2} with W = sqrt g.  It is discretized in that
// form, W^{-1/2} (-i D_mu) W^{1/2} with D_mu the periodic central
// difference, which is exactly Hermitian in the weighted product.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <functional>
#include <memory>
#include <string>

namespace shpgr {

using cplx = std::complex<double>;
using SparseC = Eigen::SparseMatrix<cplx>;

// Lorentzian 2x2 metric g_{mu nu}(t, x) on the (t, x) plane.
struct Metric2D {
  std::string name;
  std::function<Eigen::Matrix2d(double t, double x)> g;

  static Metric2D flat();
  // diag(-1, 1 + a tanh x)
  static Metric2D tanh_profile(double a = 0.2);
  // (1 + eps sin x) diag(-1, 1), so that sqrt(-det g) = 1 + eps sin x
  static Metric2D conformal_sine(double eps = 0.1);

  double sqrt_g(double t, double x) const;  // sqrt(-det g)
  Eigen::Matrix2d inverse(double t, double x) const;
};

// Site (i, j) has t = t0 + i dt, x = x0 + j dx and flat index i * n_x + j.
struct WaveGrid {
  int n_t = 1;
  int n_x = 1;
  double dt = 1.0;
  double dx = 1.0;
  double t0 = 0.0;
  double x0 = 0.0;
  Eigen::VectorXcd psi;
  Eigen::VectorXd weights;  // sqrt(g) dt dx per site
  double tau = 0.0;

  // Throws UsageError for empty lattices or non-positive spacing and
  // InvariantError if some weight is not strictly positive.
  static WaveGrid make(const Metric2D& metric, int n_t, int n_x, double dt,
                       double dx, double t0 = 0.0, double x0 = 0.0);

  int size() const { return n_t * n_x; }
  int index(int i, int j) const { return i * n_x + j; }
  double t(int i) const { return t0 + i * dt; }
  double x(int j) const { return x0 + j * dx; }
  bool same_lattice(const WaveGrid& other) const;
};

struct DiscreteOperator {
  SparseC matrix;
  bool hermitian_wrt_weighted = false;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return matrix * v; }
};

// sum_sites w psi^* chi.  Throws UsageError for different lattices.
cplx inner_product(const WaveGrid& psi, const WaveGrid& chi);
cplx inner_product(const Eigen::VectorXd& weights, const Eigen::VectorXcd& a,
                   const Eigen::VectorXcd& b);

// mu = 0 (t) or 1 (x).
DiscreteOperator momentum_operator(const Metric2D& metric,
                                   const WaveGrid& grid, int mu);

struct QuantumSpec {
  double mass = 1.0;
  Metric2D metric = Metric2D::flat();
  std::function<double(double t, double x)> potential;  // empty = 0
};

// K = (1/2M) sum p_mu g^{mu nu} p_nu + V
DiscreteOperator hamiltonian_operator(const QuantumSpec& spec,
                                      const WaveGrid& grid);

// max |(W O) - (W O)^dagger| / max |W O| over stored entries.
double hermiticity_residual(const DiscreteOperator& op,
                            const Eigen::VectorXd& weights);

// Cayley step (1 + i K dtau/2) psi' = (1 - i K dtau/2) psi with one sparse
// LU factorization reused for every step.  Throws DegeneracyError if the
// factorization fails.
class CayleyStepper {
 public:
  CayleyStepper(const DiscreteOperator& k, double dtau);
  ~CayleyStepper();
  CayleyStepper(CayleyStepper&&) noexcept;
  CayleyStepper& operator=(CayleyStepper&&) noexcept;

  void step(Eigen::VectorXcd& psi) const;
  double dtau() const { return dtau_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double dtau_;
};

struct Expectations {
  double tau = 0.0;
  double norm = 0.0;  // <psi, psi>
  double x = 0.0;
  double p = 0.0;     // <p_x>
  double k = 0.0;     // <K>
};

Expectations expectations(const WaveGrid& psi, const DiscreteOperator& p_x,
                          const DiscreteOperator& k);

// Advances psi by `steps` Cayley steps.  The observer, when given, is
// called before the first step and after every step.
using EvolutionObserver = std::function<void(const WaveGrid&)>;
WaveGrid evolve(WaveGrid psi, const QuantumSpec& spec, double dtau, int steps,
                const EvolutionObserver& observer = {});

// exp(-(x - xc)^2 / (4 sigma^2) + i k x), constant in t.
void fill_gaussian(WaveGrid& grid, double x_center, double sigma, double k);

// |psi|^2-weighted variance of x (no periodic unwrapping).
double position_variance(const WaveGrid& psi);

}  // namespace shpgr
