#pragma once

// Hand-rolled generators for property tests.

#include <cmath>
#include <numbers>
#include <random>

#include "fracsurf/geometry.hpp"
#include "fracsurf/vec.hpp"

namespace gen {

inline std::mt19937_64& rng() {
  static thread_local std::mt19937_64 r(20240611);
  return r;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }
inline int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng()); }

inline fracsurf::Vec point(int n, double box) {
  fracsurf::Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(-box, box);
  return v;
}

inline fracsurf::Vec unit(int n) {
  std::normal_distribution<double> g;
  fracsurf::Vec v(n);
  double r = 0.0;
  while (r < 1e-3) {
    for (int i = 0; i < n; ++i) v[i] = g(rng());
    r = fracsurf::norm(v);
  }
  return (1.0 / r) * v;
}

// Random primitive in dimension n.
inline fracsurf::Region primitive(int n) {
  using fracsurf::Region;
  int kind = integer(0, n == 2 ? 3 : 2);
  switch (kind) {
    case 0:
      return Region::half_space(unit(n), uniform(-1, 1));
    case 1:
      return Region::ball(point(n, 1.0), uniform(0.3, 1.5));
    case 2: {
      double lo = uniform(-1, 0.5);
      return Region::slab(unit(n), lo, lo + uniform(0.1, 1.5));
    }
    default:
      return Region::cross_cone_2d(point(2, 0.5), uniform(0, std::numbers::pi));
  }
}

// Random boolean tree of small depth.
inline fracsurf::Region region(int n, int depth = 2) {
  if (depth == 0 || integer(0, 2) == 0) return primitive(n);
  switch (integer(0, 2)) {
    case 0:
      return set_union(region(n, depth - 1), region(n, depth - 1));
    case 1:
      return set_intersection(region(n, depth - 1), region(n, depth - 1));
    default:
      return region(n, depth - 1).complement();
  }
}

}  // namespace gen
