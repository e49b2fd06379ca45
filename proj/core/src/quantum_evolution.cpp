#include "shpgr/quantum_evolution.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <vector>

#include "shpgr/errors.hpp"

namespace shpgr {

namespace {

constexpr cplx kI(0.0, 1.0);

using Triplet = Eigen::Triplet<cplx>;

SparseC diagonal(const Eigen::VectorXcd& d) {
  SparseC m(d.size(), d.size());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) t.emplace_back(i, i, d(i));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Periodic central difference along mu.
SparseC central_difference(const WaveGrid& g, int mu) {
  std::vector<Triplet> t;
  const int n = g.size();
  const int len = mu == 0 ? g.n_t : g.n_x;
  const double h = mu == 0 ? g.dt : g.dx;
  SparseC d(n, n);
  if (len < 3) return d;  // the periodic stencil cancels
  t.reserve(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < g.n_t; ++i) {
    for (int j = 0; j < g.n_x; ++j) {
      const int row = g.index(i, j);
      int fwd, bwd;
      if (mu == 0) {
        fwd = g.index((i + 1) % g.n_t, j);
        bwd = g.index((i - 1 + g.n_t) % g.n_t, j);
      } else {
        fwd = g.index(i, (j + 1) % g.n_x);
        bwd = g.index(i, (j - 1 + g.n_x) % g.n_x);
      }
      t.emplace_back(row, fwd, 0.5 / h);
      t.emplace_back(row, bwd, -0.5 / h);
    }
  }
  d.setFromTriplets(t.begin(), t.end());
  return d;
}

}  // namespace

Metric2D Metric2D::flat() {
  return {"flat", [](double, double) {
            return Eigen::Vector2d(-1.0, 1.0).asDiagonal().toDenseMatrix();
          }};
}

Metric2D Metric2D::tanh_profile(double a) {
  return {"tanh", [a](double, double x) {
            return Eigen::Vector2d(-1.0, 1.0 + a * std::tanh(x))
                .asDiagonal()
                .toDenseMatrix();
          }};
}

Metric2D Metric2D::conformal_sine(double eps) {
  return {"conformal", [eps](double, double x) {
            const double f = 1.0 + eps * std::sin(x);
            return Eigen::Vector2d(-f, f).asDiagonal().toDenseMatrix();
          }};
}

double Metric2D::sqrt_g(double t, double x) const {
  const double det = g(t, x).determinant();
  if (!(det < 0.0)) throw InvariantError("metric " + name + " is not Lorentzian");
  return std::sqrt(-det);
}

Eigen::Matrix2d Metric2D::inverse(double t, double x) const {
  return g(t, x).inverse();
}

WaveGrid WaveGrid::make(const Metric2D& metric, int n_t, int n_x, double dt,
                        double dx, double t0, double x0) {
  if (n_t < 1 || n_x < 1) throw UsageError("lattice must be non-empty");
  if (!(dt > 0.0) || !(dx > 0.0)) throw UsageError("lattice spacing must be positive");
  WaveGrid g;
  g.n_t = n_t;
  g.n_x = n_x;
  g.dt = dt;
  g.dx = dx;
  g.t0 = t0;
  g.x0 = x0;
  g.psi = Eigen::VectorXcd::Zero(g.size());
  g.weights.resize(g.size());
  for (int i = 0; i < n_t; ++i) {
    for (int j = 0; j < n_x; ++j) {
      const double w = metric.sqrt_g(g.t(i), g.x(j)) * dt * dx;
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw InvariantError("lattice weights must be strictly positive");
      }
      g.weights(g.index(i, j)) = w;
    }
  }
  return g;
}

bool WaveGrid::same_lattice(const WaveGrid& o) const {
  return n_t == o.n_t && n_x == o.n_x && dt == o.dt && dx == o.dx &&
         t0 == o.t0 && x0 == o.x0 && weights == o.weights;
}

cplx inner_product(const Eigen::VectorXd& w, const Eigen::VectorXcd& a,
                   const Eigen::VectorXcd& b) {
  if (w.size() != a.size() || w.size() != b.size()) {
    throw UsageError("inner product size mismatch");
  }
  return (a.array().conjugate() * w.array().cast<cplx>() * b.array()).sum();
}

cplx inner_product(const WaveGrid& psi, const WaveGrid& chi) {
  if (!psi.same_lattice(chi)) throw UsageError("wave functions live on different lattices");
  return inner_product(psi.weights, psi.psi, chi.psi);
}

DiscreteOperator momentum_operator(const Metric2D& metric,
                                   const WaveGrid& grid, int mu) {
  if (mu != 0 && mu != 1) throw UsageError("momentum direction must be 0 or 1");
  Eigen::VectorXd root(grid.size());
  for (int i = 0; i < grid.n_t; ++i) {
    for (int j = 0; j < grid.n_x; ++j) {
      const double s = metric.sqrt_g(grid.t(i), grid.x(j));
      if (!(s > 0.0)) throw InvariantError("sqrt(g) must be strictly positive");
      root(grid.index(i, j)) = std::sqrt(s);
    }
  }
  const SparseC d = central_difference(grid, mu);
  const SparseC p = diagonal(root.cwiseInverse().cast<cplx>()) * (-kI * d) *
                    diagonal(root.cast<cplx>());
  return {p, true};
}

DiscreteOperator hamiltonian_operator(const QuantumSpec& spec,
                                      const WaveGrid& grid) {
  if (!(spec.mass > 0.0)) throw UsageError("mass must be positive");
  const DiscreteOperator p[2] = {momentum_operator(spec.metric, grid, 0),
                                 momentum_operator(spec.metric, grid, 1)};
  const int n = grid.size();
  Eigen::VectorXcd ginv[2][2];
  for (auto& row : ginv) {
    for (auto& v : row) v.resize(n);
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < grid.n_t; ++i) {
    for (int j = 0; j < grid.n_x; ++j) {
      const int s = grid.index(i, j);
      const Eigen::Matrix2d gi = spec.metric.inverse(grid.t(i), grid.x(j));
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) ginv[a][b](s) = gi(a, b);
      }
      if (spec.potential) v(s) = spec.potential(grid.t(i), grid.x(j));
    }
  }
  SparseC k = diagonal(v);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (ginv[a][b].cwiseAbs().maxCoeff() == 0.0) continue;
      const SparseC term = p[a].matrix * diagonal(ginv[a][b]) * p[b].matrix;
      k += term * (1.0 / (2.0 * spec.mass));
    }
  }
  k.prune(cplx(0.0, 0.0));
  return {k, true};
}

double hermiticity_residual(const DiscreteOperator& op,
                            const Eigen::VectorXd& weights) {
  const SparseC wo = diagonal(weights.cast<cplx>()) * op.matrix;
  const SparseC adj = wo.adjoint();
  const SparseC diff = wo - adj;
  double scale = 0.0, worst = 0.0;
  for (int k = 0; k < wo.outerSize(); ++k) {
    for (SparseC::InnerIterator it(wo, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  if (scale == 0.0) return 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseC::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst / scale;
}

struct CayleyStepper::Impl {
  SparseC rhs;
  Eigen::SparseLU<SparseC> lu;
};

CayleyStepper::CayleyStepper(const DiscreteOperator& k, double dtau)
    : impl_(std::make_unique<Impl>()), dtau_(dtau) {
  if (!(dtau > 0.0)) throw UsageError("dtau must be positive");
  SparseC id(k.matrix.rows(), k.matrix.cols());
  id.setIdentity();
  const SparseC half = k.matrix * (kI * (0.5 * dtau));
  const SparseC lhs = id + half;
  impl_->rhs = id - half;
  impl_->lu.analyzePattern(lhs);
  impl_->lu.factorize(lhs);
  if (impl_->lu.info() != Eigen::Success) {
    throw DegeneracyError("Cayley factorization failed: " + impl_->lu.lastErrorMessage());
  }
}

CayleyStepper::~CayleyStepper() = default;
CayleyStepper::CayleyStepper(CayleyStepper&&) noexcept = default;
CayleyStepper& CayleyStepper::operator=(CayleyStepper&&) noexcept = default;

void CayleyStepper::step(Eigen::VectorXcd& psi) const {
  const Eigen::VectorXcd b = impl_->rhs * psi;
  psi = impl_->lu.solve(b);
  if (impl_->lu.info() != Eigen::Success) {
    throw DegeneracyError("Cayley solve failed");
  }
}

Expectations expectations(const WaveGrid& psi, const DiscreteOperator& p_x,
                          const DiscreteOperator& k) {
  Expectations e;
  e.tau = psi.tau;
  e.norm = inner_product(psi.weights, psi.psi, psi.psi).real();
  if (e.norm == 0.0) return e;
  Eigen::VectorXcd xpsi = psi.psi;
  for (int i = 0; i < psi.n_t; ++i) {
    for (int j = 0; j < psi.n_x; ++j) xpsi(psi.index(i, j)) *= psi.x(j);
  }
  e.x = inner_product(psi.weights, psi.psi, xpsi).real() / e.norm;
  e.p = inner_product(psi.weights, psi.psi, p_x.apply(psi.psi)).real() / e.norm;
  e.k = inner_product(psi.weights, psi.psi, k.apply(psi.psi)).real() / e.norm;
  return e;
}

WaveGrid evolve(WaveGrid psi, const QuantumSpec& spec, double dtau, int steps,
                const EvolutionObserver& observer) {
  if (steps < 0) throw UsageError("steps must be non-negative");
  const CayleyStepper stepper(hamiltonian_operator(spec, psi), dtau);
  if (observer) observer(psi);
  const double tau0 = psi.tau;
  for (int n = 1; n <= steps; ++n) {
    stepper.step(psi.psi);
    psi.tau = tau0 + n * dtau;
    if (observer) observer(psi);
  }
  return psi;
}

void fill_gaussian(WaveGrid& grid, double x_center, double sigma, double k) {
  if (!(sigma > 0.0)) throw UsageError("packet width must be positive");
  for (int i = 0; i < grid.n_t; ++i) {
    for (int j = 0; j < grid.n_x; ++j) {
      const double dx = grid.x(j) - x_center;
      grid.psi(grid.index(i, j)) =
          std::exp(cplx(-dx * dx / (4.0 * sigma * sigma), k * grid.x(j)));
    }
  }
}

double position_variance(const WaveGrid& psi) {
  double norm = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < psi.n_t; ++i) {
    for (int j = 0; j < psi.n_x; ++j) {
      const int s = psi.index(i, j);
      const double rho = psi.weights(s) * std::norm(psi.psi(s));
      norm += rho;
      m1 += rho * psi.x(j);
      m2 += rho * psi.x(j) * psi.x(j);
    }
  }
  if (norm == 0.0) return 0.0;
  m1 /= norm;
  return m2 / norm - m1 * m1;
}

}  // namespace shpgr
