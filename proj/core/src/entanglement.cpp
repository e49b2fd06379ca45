#include "shpgr/entanglement.hpp"

#include <algorithm>
#include <cmath>

namespace shpgr {

namespace {

using cd = std::complex<double>;

Eigen::Matrix2cd sigma_dot(const Eigen::Vector3d& v) {
  Eigen::Matrix2cd m;
  m << v(2), cd(v(0), -v(1)), cd(v(0), v(1)), -v(2);
  return m;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd m;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return m;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

LocalFrame frame_at_end(const GeodesicTransport& leg,
                        const SpacetimePoint& formation) {
  LocalFrame f;
  f.basepoint = {leg.positions.back(), formation.chart};
  const auto& v = leg.transported.back();
  f.N = v[0];
  for (int k = 0; k < 3; ++k) f.triad[k] = v[k + 1];
  return f;
}

Eigen::Matrix3d leg_rotation(const LocalFrame& transported,
                             const LocalFrame& reference,
                             const MetricField& metric) {
  Eigen::Matrix3d r;
  const Vec4& x = transported.basepoint.coords;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      r(k, j) = inner(metric, x, transported.triad[k], reference.triad[j]);
    }
  }
  return r;
}

}  // namespace

LocalFrame make_frame(const SpacetimePoint& p, const Vec4& n,
                      const MetricField& metric) {
  const double nn = inner(metric, p.coords, n, n);
  if (!(nn < 0.0)) throw InvariantError("inducing vector must be timelike");
  LocalFrame f;
  f.basepoint = p;
  f.N = n / std::sqrt(-nn);

  static constexpr std::array<std::array<int, 3>, 4> kSeeds{
      {{1, 2, 3}, {0, 2, 3}, {1, 0, 3}, {1, 2, 0}}};
  for (const auto& seed : kSeeds) {
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      Vec4 v = Vec4::Unit(seed[k]);
      v += inner(metric, p.coords, v, f.N) * f.N;
      for (int j = 0; j < k; ++j) {
        v -= inner(metric, p.coords, v, f.triad[j]) * f.triad[j];
      }
      const double vv = inner(metric, p.coords, v, v);
      if (!(vv > 1e-12)) {
        ok = false;
        break;
      }
      f.triad[k] = v / std::sqrt(vv);
    }
    if (ok) return f;
  }
  throw DegeneracyError("could not build an orthonormal triad");
}

double frame_residual(const LocalFrame& f, const MetricField& metric) {
  const Vec4& x = f.basepoint.coords;
  double r = std::abs(inner(metric, x, f.N, f.N) + 1.0);
  for (int a = 0; a < 3; ++a) {
    r = std::max(r, std::abs(inner(metric, x, f.N, f.triad[a])));
    for (int b = 0; b < 3; ++b) {
      r = std::max(r, std::abs(inner(metric, x, f.triad[a], f.triad[b]) -
                               (a == b ? 1.0 : 0.0)));
    }
  }
  return r;
}

Eigen::Matrix3d frame_components(const Mat4& h, const LocalFrame& frame,
                                 const MetricField& metric) {
  const Mat4 g = metric.components(frame.basepoint.coords);
  Eigen::Matrix3d m;
  for (int k = 0; k < 3; ++k) {
    const Vec4 image = h * (g * frame.triad[k]);  // covariant
    for (int l = 0; l < 3; ++l) m(l, k) = frame.triad[l].dot(image);
  }
  return m;
}

SpinState singlet_state() {
  const double r = 1.0 / std::sqrt(2.0);
  return SpinState(0.0, r, -r, 0.0);
}

bool EntangledPair::is_singlet(double tol) const {
  const SpinState s = singlet_state();
  const cd overlap = s.dot(spin_state);
  return std::abs(std::abs(overlap) - 1.0) <= tol &&
         std::abs(spin_state.norm() - 1.0) <= tol;
}

AnalyzerDirection AnalyzerDirection::make(const Eigen::Vector3d& v) {
  if (!(std::abs(v.norm() - 1.0) <= 1e-12)) {
    throw UsageError("analyzer direction must be a unit vector");
  }
  return {v};
}

AnalyzerDirection AnalyzerDirection::in_plane(double angle, int axis_a,
                                              int axis_b) {
  if (axis_a == axis_b || axis_a < 0 || axis_a > 2 || axis_b < 0 || axis_b > 2) {
    throw UsageError("analyzer plane axes must be distinct indices in 0..2");
  }
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  v(axis_a) = std::cos(angle);
  v(axis_b) = std::sin(angle);
  return {v};
}

EntangledPair form_pair(const SpacetimePoint& p, const Vec4& n,
                        const MetricField& metric) {
  metric.check_domain(p.coords);
  EntangledPair pair;
  pair.formation_point = p;
  pair.frame_1 = make_frame(p, n, metric);
  pair.frame_2 = pair.frame_1;
  pair.reference_1 = pair.frame_1;
  pair.reference_2 = pair.frame_1;
  return pair;
}

EntangledPair separate(const EntangledPair& pair, const Vec4& u1,
                       const Vec4& u2, double length, int steps,
                       const MetricField& metric) {
  const Vec4& x = pair.formation_point.coords;
  for (const Vec4* u : {&u1, &u2}) {
    if (!(inner(metric, x, *u, *u) < 0.0)) {
      throw UsageError("leg velocities must be timelike");
    }
  }
  EntangledPair out = pair;
  out.leg_length = length;
  const std::array<Vec4, 4> carried{pair.frame_1.N, pair.frame_1.triad[0],
                                    pair.frame_1.triad[1],
                                    pair.frame_1.triad[2]};
  const Vec4* velocities[2] = {&u1, &u2};
  LocalFrame* frames[2] = {&out.frame_1, &out.frame_2};
  LocalFrame* refs[2] = {&out.reference_1, &out.reference_2};
  Eigen::Matrix3d* rots[2] = {&out.rotation_1, &out.rotation_2};
  for (int i = 0; i < 2; ++i) {
    out.legs[i] = transport_along_geodesic(metric, pair.formation_point,
                                           *velocities[i], carried, length,
                                           steps);
    out.truncated = out.truncated || out.legs[i].truncated;
    *frames[i] = frame_at_end(out.legs[i], pair.formation_point);
    *refs[i] = make_frame(frames[i]->basepoint, frames[i]->N, metric);
    *rots[i] = leg_rotation(*frames[i], *refs[i], metric);
  }
  return out;
}

TransportPath separation_loop(const EntangledPair& pair, double closure_tol) {
  if (pair.legs[0].positions.size() < 2 || pair.legs[1].positions.size() < 2) {
    throw UsageError("pair has not been separated");
  }
  const Chart chart = pair.formation_point.chart;
  auto leg_path = [&](const GeodesicTransport& g) {
    const double dtau =
        pair.leg_length / static_cast<double>(g.positions.size() - 1);
    return TransportPath::from_samples(g.positions, g.velocities, chart, dtau);
  };
  return TransportPath::concatenate(leg_path(pair.legs[1]),
                                    leg_path(pair.legs[0]).reversed(),
                                    closure_tol);
}

Eigen::Matrix3d relative_frame_map(const EntangledPair& pair) {
  return pair.rotation_1 * pair.rotation_2.transpose();
}

double correlation(const EntangledPair& pair, const AnalyzerDirection& a,
                   const AnalyzerDirection& b) {
  AnalyzerDirection::make(a.direction);
  AnalyzerDirection::make(b.direction);
  const Eigen::Vector3d ap = pair.rotation_1 * a.direction;
  const Eigen::Vector3d bp = pair.rotation_2 * b.direction;
  const Eigen::Matrix4cd op = kron(sigma_dot(ap), sigma_dot(bp));
  return pair.spin_state.dot(op * pair.spin_state).real();
}

EprSampler::EprSampler(const EntangledPair& pair, const AnalyzerDirection& a,
                       const AnalyzerDirection& b, std::uint64_t seed)
    : rng_(seed) {
  AnalyzerDirection::make(a.direction);
  AnalyzerDirection::make(b.direction);
  const Eigen::Matrix2cd sa = sigma_dot(pair.rotation_1 * a.direction);
  const Eigen::Matrix2cd sb = sigma_dot(pair.rotation_2 * b.direction);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  int k = 0;
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      const Eigen::Matrix4cd proj =
          kron(0.5 * (id + double(s1) * sa), 0.5 * (id + double(s2) * sb));
      p_[k++] = std::max(0.0, pair.spin_state.dot(proj * pair.spin_state).real());
    }
  }
  const double total = p_[0] + p_[1] + p_[2] + p_[3];
  for (double& v : p_) v /= total;
}

Outcome EprSampler::next() {
  const double u = uniform01(rng_);
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    acc += p_[k];
    if (u < acc || k == 3) return {k < 2 ? 1 : -1, k % 2 == 0 ? 1 : -1};
  }
  return {};
}

Outcome epr_outcome_sample(const EntangledPair& pair,
                           const AnalyzerDirection& a,
                           const AnalyzerDirection& b, std::uint64_t seed) {
  return EprSampler(pair, a, b, seed).next();
}

SampledCorrelation sample_correlation(const EntangledPair& pair,
                                      const AnalyzerDirection& a,
                                      const AnalyzerDirection& b,
                                      long long samples, std::uint64_t seed) {
  if (samples < 2) throw UsageError("need at least two samples");
  EprSampler sampler(pair, a, b, seed);
  long long sum = 0;
  for (long long i = 0; i < samples; ++i) {
    const Outcome o = sampler.next();
    sum += o.s1 * o.s2;
  }
  SampledCorrelation c;
  c.samples = samples;
  c.mean = static_cast<double>(sum) / static_cast<double>(samples);
  c.stderr_ = std::sqrt(std::max(0.0, 1.0 - c.mean * c.mean) /
                        static_cast<double>(samples));
  return c;
}

ChshResult chsh(const EntangledPair& pair, const AnalyzerDirection& a,
                const AnalyzerDirection& a2, const AnalyzerDirection& b,
                const AnalyzerDirection& b2, long long samples,
                std::uint64_t seed) {
  const std::array<std::pair<const AnalyzerDirection*, const AnalyzerDirection*>, 4>
      terms{{{&a, &b}, {&a, &b2}, {&a2, &b}, {&a2, &b2}}};
  constexpr std::array<double, 4> sign{1.0, -1.0, 1.0, 1.0};
  double exact = 0.0, sampled = 0.0, var = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    exact += sign[k] * correlation(pair, *terms[k].first, *terms[k].second);
    const SampledCorrelation c = sample_correlation(
        pair, *terms[k].first, *terms[k].second, samples, seed + k);
    sampled += sign[k] * c.mean;
    var += c.stderr_ * c.stderr_;
  }
  return {std::abs(exact), std::abs(sampled), std::sqrt(var)};
}

}  // namespace shpgr
