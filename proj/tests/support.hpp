#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "shpgr/geometry.hpp"
#include "shpgr/induced_rep.hpp"

namespace shpgr::test {

inline constexpr double kPi = std::numbers::pi;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20240611);
  return engine;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Eigen::Vector3d random_unit3() {
  std::normal_distribution<double> nd;
  Eigen::Vector3d v(nd(rng()), nd(rng()), nd(rng()));
  return v.normalized();
}

// Unit timelike vector with rapidity up to max_rapidity, upper cone unless
// lower is set.
inline Vec4 random_timelike(double max_rapidity = 2.0, bool lower = false) {
  const double y = uniform(0.0, max_rapidity);
  Vec4 n;
  n << std::cosh(y), std::sinh(y) * random_unit3();
  return lower ? Vec4(-n) : n;
}

inline LorentzTransform random_lorentz(double max_rapidity = 1.5) {
  return LorentzTransform::boost(uniform(-max_rapidity, max_rapidity), random_unit3()) *
         LorentzTransform::rotation(uniform(-kPi, kPi), random_unit3());
}

inline Eigen::Vector2cd random_spinor() {
  std::normal_distribution<double> nd;
  const double a = nd(rng()), b = nd(rng()), c = nd(rng()), d = nd(rng());
  return Eigen::Vector2cd(std::complex<double>(a, b), std::complex<double>(c, d));
}

}  // namespace shpgr::test
