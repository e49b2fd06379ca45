#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "shpgr/dynamics.hpp"
#include "shpgr/entanglement.hpp"
#include "shpgr/induced_rep.hpp"
#include "shpgr/quantum_evolution.hpp"
#include "shpgr/spin_algebra.hpp"
#include "shpgr/transport.hpp"

using namespace shpgr;
constexpr double kPi = std::numbers::pi;

static void BM_CircularOrbitRK4(benchmark::State& state) {
  const HamiltonianSpec spec{1.0, MetricField::schwarzschild(1.0), PotentialField::zero()};
  const double ut = std::sqrt(2.0);
  const PhaseState s0 = state_from_velocity(spec, {Vec4(0, 6, kPi / 2, 0), Chart::spherical},
                                            Vec4(ut, 0, 0, ut / std::sqrt(216.0)));
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_trajectory(spec, s0, 0.1, steps));
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_CircularOrbitRK4)->Arg(1000)->Arg(10000);

static void BM_LatitudeHolonomy(benchmark::State& state) {
  const MetricField m = MetricField::schwarzschild(1.0);
  const TransportPath path = TransportPath::latitude_circle(Chart::spherical, 10.0, kPi / 3);
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(holonomy(path, m, TransportMode::full, steps));
}
BENCHMARK(BM_LatitudeHolonomy)->Arg(1000)->Arg(4000);

static void BM_CayleyStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Metric2D metric = Metric2D::conformal_sine(0.1);
  WaveGrid g = WaveGrid::make(metric, n, n, 2 * kPi / n, 2 * kPi / n, 0.0, -kPi);
  fill_gaussian(g, 0.0, 0.5, 1.0);
  const CayleyStepper stepper(hamiltonian_operator(QuantumSpec{1.0, metric, {}}, g), 0.01);
  for (auto _ : state) {
    stepper.step(g.psi);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_CayleyStep)->Arg(32)->Arg(64);

static void BM_LorentzAlgebra(benchmark::State& state) {
  const GammaBasis basis = build_gammas();
  const InducingVector n = InducingVector::make(Vec4(std::cosh(0.7), std::sinh(0.7), 0, 0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_lorentz_algebra(n, basis));
}
BENCHMARK(BM_LorentzAlgebra);

static void BM_WignerD(benchmark::State& state) {
  const InducingVector n = InducingVector::make(Vec4(std::cosh(0.7), 0, std::sinh(0.7), 0));
  const LorentzTransform l = LorentzTransform::boost(0.4, Eigen::Vector3d(1, 1, 0)) *
                             LorentzTransform::rotation(0.9, Eigen::Vector3d(0, 0, 1));
  for (auto _ : state) benchmark::DoNotOptimize(wigner_d(l, n));
}
BENCHMARK(BM_WignerD);

static void BM_EprSampling(benchmark::State& state) {
  const EntangledPair p = form_pair({Vec4::Zero(), Chart::cartesian}, Vec4(1, 0, 0, 0), MetricField::minkowski());
  const auto a = AnalyzerDirection::in_plane(0.0), b = AnalyzerDirection::in_plane(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(sample_correlation(p, a, b, 100000, 1));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_EprSampling);
BENCHMARK_MAIN();
