#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "nehari/analysis.hpp"

namespace nehari::test {

inline constexpr double kPi = std::numbers::pi;

/// a = 0, g = 1, p = 3 on (-1, 1).
inline std::shared_ptr<const EllipticModel> cubic_interval(int n = 1000) {
  Resolution res;
  res.n_elements = n;
  return make_model(preset_henon(0.0, 3.0, DomainKind::Interval), res);
}

inline Resolution small_2d() {
  Resolution res;
  res.nx = res.ny = 24;
  res.n_theta = 32;
  res.n_r = 24;
  return res;
}

/// Composite 5-point Gauss-Legendre on [a, b]; written out by hand so it
/// shares nothing with the library's rule.
template <class Fn>
double reference_integral(Fn&& fn, double a, double b, int panels = 4000) {
  static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                              0.9061798459386640};
  static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                              0.2369268850561891};
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    for (int i = 0; i < 5; ++i) sum += w[i] * fn(mid + 0.5 * h * x[i]);
  }
  return 0.5 * h * sum;
}

inline DiscreteField random_field(const Discretization& disc, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector c(disc.dof_count());
  for (auto& v : c) v = normal(rng);
  return disc.make_field(std::move(c));
}

}  // namespace nehari::test
