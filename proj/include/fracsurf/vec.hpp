#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>

#include "fracsurf/errors.hpp"

namespace fracsurf {

inline constexpr int kMaxDim = 4;

// Small fixed-capacity vector for points in R^n, n <= kMaxDim.
struct Vec {
  std::array<double, kMaxDim> c{};
  int n = 0;

  Vec() = default;
  explicit Vec(int dim) : n(dim) {
    if (dim < 1 || dim > kMaxDim) throw DomainError("vector dimension out of range: " + std::to_string(dim));
  }
  Vec(std::initializer_list<double> xs) : n(static_cast<int>(xs.size())) {
    if (n < 1 || n > kMaxDim) throw DomainError("vector dimension out of range");
    int i = 0;
    for (double x : xs) c[i++] = x;
  }

  static Vec zero(int dim) { return Vec(dim); }
  static Vec unit(int dim, int axis) {
    Vec v(dim);
    v.c[axis] = 1.0;
    return v;
  }

  int dim() const { return n; }
  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double a) {
    for (int i = 0; i < n; ++i) c[i] *= a;
    return *this;
  }
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator-(Vec a) { return a *= -1.0; }

inline double dot(const Vec& a, const Vec& b) {
  double r = 0.0;
  for (int i = 0; i < a.n; ++i) r += a.c[i] * b.c[i];
  return r;
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline Vec normalized(const Vec& a) { return a * (1.0 / norm(a)); }

inline void require_same_dim(const Vec& a, int n, const char* what) {
  if (a.n != n) throw DomainError(std::string("dimension mismatch for ") + what);
}

// Orthonormal basis of the complement of unit vector `v` (n-1 vectors).
inline std::array<Vec, kMaxDim - 1> orthonormal_complement(const Vec& v) {
  std::array<Vec, kMaxDim - 1> out{};
  int n = v.n;
  int k = 0;
  for (int axis = 0; axis < n && k < n - 1; ++axis) {
    // Gram-Schmidt over the coordinate axes, skipping the one most aligned with v.
    int skip = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[skip])) skip = i;
    if (axis == skip) continue;
    Vec w = Vec::unit(n, axis);
    w -= dot(w, v) * v;
    for (int j = 0; j < k; ++j) w -= dot(w, out[j]) * out[j];
    out[k++] = normalized(w);
  }
  return out;
}

}  // namespace fracsurf
