#pragma once

// Independent oracles for the unit tests: finite differences on plain point
// evaluation, truncated power series, and a small seeded generator.

#include "bblab/surface.hpp"
#include "bblab/types.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace testing_support {

using bblab::Complex;
using bblab::SurfacePatch;
using bblab::Vec;
using bblab::Vec2;

/// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Vec2 vec2(double r = 1.0) { return {uniform(-r, r), uniform(-r, r)}; }
  Vec vec(int n, double r = 1.0) {
    Vec v(n);
    for (int k = 0; k < n; ++k) v[k] = uniform(-r, r);
    return v;
  }
  Complex disc(double radius) {
    const double rho = radius * std::sqrt(uniform(0.0, 1.0));
    return std::polar(rho, uniform(0.0, 2.0 * 3.141592653589793));
  }

 private:
  std::mt19937_64 rng_;
};

/// Central first partial of the immersion.
inline Vec fd_partial(const SurfacePatch& s, double x, double y, int i, double h = 1e-5) {
  return i == 0 ? Vec((s.point(x + h, y) - s.point(x - h, y)) / (2.0 * h))
                : Vec((s.point(x, y + h) - s.point(x, y - h)) / (2.0 * h));
}

/// Central second partial of the immersion.
inline Vec fd_second(const SurfacePatch& s, double x, double y, int i, int j, double h = 1e-3) {
  if (i == j) {
    const double dx = i == 0 ? h : 0.0;
    const double dy = i == 0 ? 0.0 : h;
    return (s.point(x + dx, y + dy) - 2.0 * s.point(x, y) + s.point(x - dx, y - dy)) / (h * h);
  }
  return (s.point(x + h, y + h) - s.point(x + h, y - h) - s.point(x - h, y + h) + s.point(x - h, y - h)) /
         (4.0 * h * h);
}

/// Relative error with a floor on the reference magnitude.
inline double rel_err(const Vec& got, const Vec& want, double floor = 1.0) {
  return (got - want).norm() / std::max(floor, want.norm());
}

/// Taylor coefficients c_0..c_{order} of z / (1 - c z)^2 by series division.
inline std::vector<Complex> koebe_series(Complex c, int order) {
  const std::vector<Complex> den{1.0, -2.0 * c, c * c};
  std::vector<Complex> inv(static_cast<std::size_t>(order) + 1, 0.0);
  inv[0] = 1.0;
  for (int k = 1; k <= order; ++k) {
    Complex acc = 0.0;
    for (int j = 1; j <= std::min(k, 2); ++j) acc -= den[static_cast<std::size_t>(j)] * inv[static_cast<std::size_t>(k - j)];
    inv[static_cast<std::size_t>(k)] = acc;
  }
  std::vector<Complex> out(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 1; k <= order; ++k) out[static_cast<std::size_t>(k)] = inv[static_cast<std::size_t>(k - 1)];
  return out;
}

}  // namespace testing_support
