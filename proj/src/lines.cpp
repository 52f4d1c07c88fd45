#include "fracsurf/lines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracsurf/errors.hpp"

namespace fracsurf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec perp2(const Vec& v) { return Vec{-v[1], v[0]}; }

// Angle of the line with direction d, reduced to [0, pi).
double line_angle(const Vec& d) {
  double a = std::atan2(d[1], d[0]);
  if (a < 0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

struct Curve {
  bool is_line;
  Vec p, d;  // line: point and unit direction
  Vec c;     // circle: center and radius
  double r = 0.0;
};

void add_unique(std::vector<Vec>& pts, const Vec& q) {
  for (const auto& p : pts)
    if (norm(p - q) < 1e-13 * std::max(1.0, norm(q))) return;
  pts.push_back(q);
}

void intersect(const Curve& A, const Curve& B, std::vector<Vec>& out) {
  if (A.is_line && B.is_line) {
    double det = A.d[0] * (-B.d[1]) - A.d[1] * (-B.d[0]);
    if (std::abs(det) < 1e-14) return;
    Vec rhs = B.p - A.p;
    double t = (rhs[0] * (-B.d[1]) - rhs[1] * (-B.d[0])) / det;
    add_unique(out, A.p + t * A.d);
    return;
  }
  if (!A.is_line && B.is_line) return intersect(B, A, out);
  if (A.is_line) {
    Vec w = A.p - B.c;
    double b = dot(A.d, w), c = norm2(w) - B.r * B.r;
    double disc = b * b - c;
    if (disc < 0) return;
    double sq = std::sqrt(disc);
    add_unique(out, A.p + (-b - sq) * A.d);
    add_unique(out, A.p + (-b + sq) * A.d);
    return;
  }
  Vec dc = B.c - A.c;
  double D = norm(dc);
  if (D == 0.0 || D > A.r + B.r || D < std::abs(A.r - B.r)) return;
  double a = (A.r * A.r - B.r * B.r + D * D) / (2 * D);
  double h = std::sqrt(std::max(0.0, A.r * A.r - a * a));
  Vec u = (1.0 / D) * dc;
  Vec base = A.c + a * u;
  add_unique(out, base + h * perp2(u));
  add_unique(out, base - h * perp2(u));
}

}  // namespace

std::vector<Vec> pivot_points(const RegionFeatures& f, const std::optional<Window>& window) {
  std::vector<Vec> out;
  for (const auto& a : f.apexes)
    if (a.n == 2) add_unique(out, a);
  std::vector<Curve> curves;
  for (const auto& [m, off] : f.planes)
    if (m.n == 2) curves.push_back(Curve{true, off * m, perp2(m), Vec{0.0, 0.0}, 0.0});
  for (size_t i = 0; i < f.apexes.size(); ++i)
    for (size_t k = 0; k < 2 && 2 * i + k < f.axes.size(); ++k)
      curves.push_back(Curve{true, f.apexes[i], f.axes[2 * i + k], Vec{0.0, 0.0}, 0.0});
  for (const auto& s : f.spheres)
    if (s.center.n == 2) curves.push_back(Curve{false, Vec{0.0, 0.0}, Vec{0.0, 0.0}, s.center, s.radius});
  if (window && window->center.n == 2)
    curves.push_back(Curve{false, Vec{0.0, 0.0}, Vec{0.0, 0.0}, window->center, window->radius});
  for (size_t i = 0; i < curves.size(); ++i)
    for (size_t j = i + 1; j < curves.size(); ++j) intersect(curves[i], curves[j], out);
  return out;
}

// ---------------------------------------------------------------- line-space integrals

MultiEstimate integrate_lines_k(int K, const Window& window, const LineFunctionK& F, const RegionFeatures& features,
                                const QuadratureSpec& spec, int depth) {
  const int n = window.center.n;
  const Vec c = window.center;
  const double rho = window.radius;
  if (n == 1) {
    MultiEstimate r;
    r.value.assign(K, 0.0);
    r.error.assign(K, 0.0);
    SampleMeta meta;
    F(c, Vec{1.0}, std::span<double>(r.value), std::span<double>(r.error), meta);
    r.work = meta.work;
    r.status = meta.status;
    return r;
  }
  auto copy_out = [K](const MultiEstimate& m, std::span<double> v, std::span<double> e, SampleMeta& meta) {
    for (int k = 0; k < K; ++k) {
      v[k] = m.value[k];
      e[k] = m.error[k];
    }
    meta.work = m.work;
    meta.status = m.status;
  };
  if (n == 2) {
    auto pivots = pivot_points(features, window);
    Options1D oa = options_from(spec, depth);
    oa.all_singular = true;
    for (const auto& m : features.plane_normals) oa.breakpoints.push_back(line_angle(perp2(m)));
    for (const auto& ax : features.axes) oa.breakpoints.push_back(line_angle(ax));
    MultiIntegrand outer = [&](double alpha, std::span<double> v, std::span<double> e, SampleMeta& meta) {
      Vec theta{std::cos(alpha), std::sin(alpha)};
      Vec nrm = perp2(theta);
      Options1D op = options_from(spec, depth + 1);
      op.all_singular = true;
      for (const auto& s : features.spheres) {
        double pc = dot(s.center - c, nrm);
        op.breakpoints.push_back(pc - s.radius);
        op.breakpoints.push_back(pc + s.radius);
      }
      for (const auto& q : pivots) op.breakpoints.push_back(dot(q - c, nrm));
      MultiIntegrand inner = [&](double p, std::span<double> vi, std::span<double> ei, SampleMeta& mi) {
        F(c + p * nrm, theta, vi, ei, mi);
      };
      copy_out(integrate_1d_multi(K, inner, -rho, rho, op), v, e, meta);
    };
    return integrate_1d_multi(K, outer, 0.0, kPi, oa);
  }
  // n = 3: theta in the upper hemisphere (w = cos of polar angle), p in the disk in polar form.
  Options1D ow = options_from(spec, depth);
  ow.all_singular = true;
  MultiIntegrand level_w = [&](double w, std::span<double> v, std::span<double> e, SampleMeta& meta) {
    double sw = std::sqrt(std::max(0.0, 1 - w * w));
    Options1D og = options_from(spec, depth + 1);
    og.all_singular = true;
    MultiIntegrand level_g = [&](double g, std::span<double> v2, std::span<double> e2, SampleMeta& m2) {
      Vec theta{sw * std::cos(g), sw * std::sin(g), w};
      Vec e1{-std::sin(g), std::cos(g), 0.0};
      Vec e2v{theta[1] * e1[2] - theta[2] * e1[1], theta[2] * e1[0] - theta[0] * e1[2],
              theta[0] * e1[1] - theta[1] * e1[0]};
      Options1D oo = options_from(spec, depth + 2);
      oo.all_singular = true;
      MultiIntegrand level_o = [&](double om, std::span<double> v3, std::span<double> e3, SampleMeta& m3) {
        Vec u = std::cos(om) * e1 + std::sin(om) * e2v;
        Options1D oq = options_from(spec, depth + 3);
        oq.all_singular = true;
        for (const auto& s : features.spheres) {
          Vec P = s.center - c;
          P -= dot(P, theta) * theta;
          double up = dot(u, P);
          double disc = up * up - norm2(P) + s.radius * s.radius;
          if (disc > 0) {
            oq.breakpoints.push_back(up - std::sqrt(disc));
            oq.breakpoints.push_back(up + std::sqrt(disc));
          }
        }
        MultiIntegrand level_q = [&](double q, std::span<double> v4, std::span<double> e4, SampleMeta& m4) {
          F(c + q * u, theta, v4, e4, m4);
          for (int k = 0; k < K; ++k) {
            v4[k] *= q;
            e4[k] *= q;
          }
        };
        copy_out(integrate_1d_multi(K, level_q, 0.0, rho, oq), v3, e3, m3);
      };
      copy_out(integrate_1d_multi(K, level_o, 0.0, 2 * kPi, oo), v2, e2, m2);
    };
    copy_out(integrate_1d_multi(K, level_g, 0.0, 2 * kPi, og), v, e, meta);
  };
  return integrate_1d_multi(K, level_w, 0.0, 1.0, ow);
}

Estimate integrate_lines(const Window& window, const LineFunction& F, const RegionFeatures& features,
                         const QuadratureSpec& spec, int depth) {
  LineFunctionK g = [&](const Vec& o, const Vec& d, std::span<double> v, std::span<double>, SampleMeta&) {
    v[0] = F(o, d);
  };
  return integrate_lines_k(1, window, g, features, spec, depth).component(0);
}

MultiEstimate integrate_lines_through_k(int K, const Vec& x, const Vec& axis_in, const LineFunctionK& F,
                                        const RegionFeatures& features, const QuadratureSpec& spec, int depth,
                                        bool joint) {
  const int n = x.n;
  if (n == 1) {
    MultiEstimate r;
    r.value.assign(K, 0.0);
    r.error.assign(K, 0.0);
    SampleMeta meta;
    F(x, Vec{1.0}, std::span<double>(r.value), std::span<double>(r.error), meta);
    r.work = meta.work;
    r.status = meta.status;
    return r;
  }
  Vec axis = norm(axis_in) > 0 ? normalized(axis_in) : Vec::unit(n, n - 1);
  auto copy_out = [K](const MultiEstimate& m, std::span<double> v, std::span<double> e, SampleMeta& meta) {
    for (int k = 0; k < K; ++k) {
      v[k] = m.value[k];
      e[k] = m.error[k];
    }
    meta.work = m.work;
    meta.status = m.status;
  };
  if (n == 2) {
    Vec T{axis[1], -axis[0]};
    auto angle_of = [&](const Vec& d) {
      double a = std::atan2(dot(d, axis), dot(d, T));
      if (a < 0) a += kPi;
      if (a >= kPi) a -= kPi;
      return a;
    };
    Options1D oa = options_from(spec, depth);
    oa.all_singular = true;
    oa.joint_tolerance = joint;
    for (const auto& m : features.plane_normals) oa.breakpoints.push_back(angle_of(perp2(m)));
    for (const auto& ax : features.axes) oa.breakpoints.push_back(angle_of(ax));
    for (const auto& ap : features.apexes)
      if (norm(ap - x) > 1e-13) oa.breakpoints.push_back(angle_of(ap - x));
    for (const auto& s : features.spheres) {
      Vec to = s.center - x;
      double D = norm(to);
      if (std::abs(D - s.radius) <= 1e-12 * s.radius) {
        oa.breakpoints.push_back(angle_of(perp2(to)));
      } else if (D > s.radius) {
        double beta = std::atan2(to[1], to[0]);
        double half = std::asin(s.radius / D);
        for (double b : {beta - half, beta + half}) oa.breakpoints.push_back(angle_of(Vec{std::cos(b), std::sin(b)}));
      }
    }
    MultiIntegrand f = [&](double a, std::span<double> v, std::span<double> e, SampleMeta& meta) {
      F(x, std::cos(a) * T + std::sin(a) * axis, v, e, meta);
    };
    return integrate_1d_multi(K, f, 0.0, kPi, oa);
  }
  auto basis = orthonormal_complement(axis);
  Vec T1 = basis[0], T2 = basis[1];
  Options1D ow = options_from(spec, depth);
  ow.all_singular = true;
  ow.joint_tolerance = joint;
  MultiIntegrand level_w = [&](double w, std::span<double> v, std::span<double> e, SampleMeta& meta) {
    double sw = std::sqrt(std::max(0.0, 1 - w * w));
    Options1D og = options_from(spec, depth + 1);
    og.joint_tolerance = joint;
    MultiIntegrand level_g = [&](double g, std::span<double> v2, std::span<double> e2, SampleMeta& m2) {
      F(x, sw * std::cos(g) * T1 + sw * std::sin(g) * T2 + w * axis, v2, e2, m2);
    };
    copy_out(integrate_1d_multi(K, level_g, 0.0, 2 * kPi, og), v, e, meta);
  };
  return integrate_1d_multi(K, level_w, 0.0, 1.0, ow);
}

Estimate integrate_lines_through(const Vec& x, const Vec& axis, const LineFunction& F, const RegionFeatures& features,
                                 const QuadratureSpec& spec, int depth) {
  LineFunctionK g = [&](const Vec& o, const Vec& d, std::span<double> v, std::span<double>, SampleMeta&) {
    v[0] = F(o, d);
  };
  return integrate_lines_through_k(1, x, axis, g, features, spec, depth).component(0);
}

// ---------------------------------------------------------------- one-line functionals

namespace {

// (x+h)^{1-s} - x^{1-s} without cancellation for h << x.
inline double phi_diff(double x, double h, double s) {
  if (x <= 0.0) return std::pow(h, 1 - s);
  return std::pow(x, 1 - s) * std::expm1((1 - s) * std::log1p(h / x));
}

// int_a^b int_c^d (u-t)^{-1-s} du dt for a < b <= c < d.
double ordered_pair(double a, double b, double c, double d, double s) {
  bool left_inf = std::isinf(a), right_inf = std::isinf(d);
  if (left_inf && right_inf) throw DivergenceError("interaction of two opposite half-lines is infinite");
  double gap = c - b;
  double v;
  if (left_inf)
    v = phi_diff(gap, d - c, s);
  else if (right_inf)
    v = phi_diff(gap, b - a, s);
  else if (b - a <= d - c)
    v = phi_diff(gap, b - a, s) - phi_diff(gap + (d - c), b - a, s);
  else
    v = phi_diff(gap, d - c, s) - phi_diff(gap + (b - a), d - c, s);
  return v / (s * (1 - s));
}

}  // namespace

double pair_interaction(const IntervalSet& A, const IntervalSet& B, double s) {
  double total = 0.0;
  for (const auto& I : A)
    for (const auto& J : B) {
      if (std::max(I.lo, J.lo) < std::min(I.hi, J.hi))
        throw DivergenceError("interaction sets overlap on a set of positive measure");
      if (I.hi <= J.lo)
        total += ordered_pair(I.lo, I.hi, J.lo, J.hi, s);
      else
        total += ordered_pair(J.lo, J.hi, I.lo, I.hi, s);
    }
  return total;
}

namespace {

// int_{r0}^{r1} (l0 + beta (r - r0)) r^{-1-s} dr, stable for short segments.
double segment_integral(double r0, double r1, double l0, double l1, double s) {
  double beta = (l1 - l0) / (r1 - r0);
  if (r0 == 0.0) return beta * std::pow(r1, 1 - s) / (1 - s);
  double H = (r1 - r0) / r0, lg = std::log1p(H);
  double base = l0 * std::pow(r0, -s) * -std::expm1(-s * lg) / s;
  double J;
  if (H < 1e-3) {
    // int_0^H u (1+u)^{-1-s} du as a power series.
    double c = 1.0, hp = H * H;
    J = 0.0;
    for (int k = 0; k < 8; ++k) {
      J += c * hp / (k + 2);
      c *= (-1 - s - k) / (k + 1);
      hp *= H;
    }
  } else {
    J = std::expm1((1 - s) * lg) / (1 - s) + std::expm1(-s * lg) / s;
  }
  return base + beta * std::pow(r0, 1 - s) * J;
}

}  // namespace

double q_form_line(const IntervalSet& E_in, const Interval& W_in, double s) {
  // Coordinates centred on W. Pairs with both points in N = W widened by a margin are summed from the
  // piecewise-linear measure below; pairs reaching beyond N have their other point in W and are
  // interactions at distance at least the margin.
  const double c = 0.5 * (W_in.lo + W_in.hi), hw = 0.5 * (W_in.hi - W_in.lo);
  const Interval W{-hw, hw}, N{-5 * hw, 5 * hw};
  const IntervalSet Wset{W}, Nset{N};
  const IntervalSet E = interval_shift(E_in, -c);
  const IntervalSet En = interval_intersection(E, Nset);
  std::vector<double> ends{W.lo, W.hi, N.lo, N.hi};
  for (const auto& iv : En) {
    ends.push_back(iv.lo);
    ends.push_back(iv.hi);
  }
  std::vector<double> rs{0.0};
  for (double a : ends)
    for (double b : ends)
      if (a > b && a - b <= N.hi - N.lo) rs.push_back(a - b);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  auto ell = [&](double r) {
    if (r == 0.0) return 0.0;
    IntervalSet Es = interval_shift(En, -r);
    IntervalSet sym = interval_union(interval_difference(En, Es), interval_difference(Es, En));
    IntervalSet dom = interval_intersection(interval_union(Wset, interval_shift(Wset, -r)),
                                            interval_intersection(Nset, interval_shift(Nset, -r)));
    return interval_length(interval_intersection(dom, sym));
  };
  std::vector<double> ls(rs.size());
  for (size_t i = 0; i < rs.size(); ++i) ls[i] = ell(rs[i]);
  CompensatedSum total;
  for (size_t i = 0; i + 1 < rs.size(); ++i) total.add(segment_integral(rs[i], rs[i + 1], ls[i], ls[i + 1], s));
  const IntervalSet Ec = interval_complement(E);
  const IntervalSet F = interval_complement(Nset);
  const IntervalSet EW = interval_intersection(E, Wset), EcW = interval_intersection(Ec, Wset);
  const IntervalSet EF = interval_intersection(E, F), EcF = interval_intersection(Ec, F);
  if (!EW.empty() && !EcF.empty()) total.add(pair_interaction(EW, EcF, s));
  if (!EcW.empty() && !EF.empty()) total.add(pair_interaction(EcW, EF, s));
  return total.value();
}

LinePV pv_line(IntervalSet E, double s, double snap) {
  IntervalSet cleaned;
  for (auto iv : E) {
    if (std::abs(iv.lo) < snap) iv.lo = 0.0;
    if (std::abs(iv.hi) < snap) iv.hi = 0.0;
    if (iv.hi > iv.lo) cleaned.push_back(iv);
  }
  std::vector<double> pts{0.0};
  for (const auto& iv : cleaned) {
    if (std::isfinite(iv.lo)) pts.push_back(iv.lo);
    if (std::isfinite(iv.hi)) pts.push_back(iv.hi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  pts.insert(pts.begin(), -kInf);
  pts.push_back(kInf);
  LinePV out;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    double mid = std::isinf(lo) ? hi - 1.0 - std::abs(hi) : (std::isinf(hi) ? lo + 1.0 + std::abs(lo) : 0.5 * (lo + hi));
    double sigma = interval_contains(cleaned, mid) ? -1.0 : 1.0;
    double A, B;
    if (hi <= 0.0) {
      A = -hi;
      B = -lo;
    } else {
      A = lo;
      B = hi;
    }
    double powB = std::isinf(B) ? 0.0 : std::pow(B, -s);
    if (A == 0.0) {
      out.finite_part -= sigma * powB / s;
      out.divergent += sigma;
    } else {
      out.finite_part += sigma * (std::pow(A, -s) - powB) / s;
    }
  }
  return out;
}

}  // namespace fracsurf
