#include "fracsurf/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracsurf/errors.hpp"
#include "fracsurf/lines.hpp"

namespace fracsurf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Estimate exact(double v) {
  Estimate e;
  e.value = v;
  e.work = 1;
  return e;
}

// Radial moments of the kernel and its derivatives along rays from the base point:
// m0 = M(n, s) for U, m1 = M(n+1, s+1) for d/dx_i, m2 = M(n, s+2) for d/dh.
struct Moments {
  RadialMoment m0, m1, m2;
  explicit Moments(const FractionalParams& p) : m0(p.n, p.s), m1(p.n + 1, p.s + 1), m2(p.n, p.s + 2) {}
};

struct RaySums {
  double pos0 = 0, neg0 = 0, pos1 = 0, neg1 = 0, all2 = 0;
};

// Sums of moment increments over the parts of `set` on either side of t = 0, in units tau = |t|/h.
RaySums ray_sums(const IntervalSet& set, double h, const Moments& M) {
  RaySums r;
  auto add = [&](double t0, double t1, bool positive) {
    double a = t0 / h, b = t1 / h;
    double d0 = M.m0.between(a, b), d1 = M.m1.between(a, b), d2 = M.m2.between(a, b);
    (positive ? r.pos0 : r.neg0) += d0;
    (positive ? r.pos1 : r.neg1) += d1;
    r.all2 += d2;
  };
  for (const auto& iv : set) {
    if (iv.hi > 0.0) add(std::max(iv.lo, 0.0), iv.hi, true);
    if (iv.lo < 0.0) add(std::max(-iv.hi, 0.0), -iv.lo, false);
  }
  return r;
}

Vec embed_check(const UpperHalfPoint& X, const FractionalParams& p, const char* what) {
  require_same_dim(X.base, p.n, what);
  return X.base;
}

}  // namespace

UpperHalfPoint::UpperHalfPoint(Vec b, double h) : base(b), height(h) {
  if (!(height > 0.0) || !std::isfinite(height)) throw DomainError("upper half-space point needs height > 0");
}

EnergyBall::EnergyBall(Vec c, double r) : center_base(c), radius(r) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("energy ball radius must be positive");
}

double poisson_kernel(const UpperHalfPoint& X, const Vec& y, const FractionalParams& params) {
  embed_check(X, params, "poisson kernel point");
  require_same_dim(y, params.n, "poisson kernel argument");
  const double a = closed_constant(ClosedConstantId::poisson_a, params);
  const double h = X.height, s = params.s;
  double d2 = norm2(X.base - y) + h * h;
  return a * std::pow(h, s) * std::pow(d2, -0.5 * (params.n + s));
}

Estimate poisson_mass(const UpperHalfPoint& X, const FractionalParams& params, const QuadratureSpec& spec) {
  embed_check(X, params, "poisson mass point");
  Integrand f{[&](const Vec& z) { return poisson_kernel(X, X.base + z, params); }, std::nullopt};
  QuadratureSpec sp = spec;
  return integrate(f, AllSpace{params.n}, sp);
}

namespace {

// Either U alone or its gradient (d/dx_1..d/dx_n, d/dh), integrated as one vector.
MultiEstimate extension_components(const Region& E, const UpperHalfPoint& X, const FractionalParams& params,
                                   const QuadratureSpec& spec, int depth, const Moments& M,
                                   const RegionFeatures& features, bool gradient) {
  const int n = params.n;
  const double h = X.height, s = params.s;
  const bool inside = E.contains(X.base);
  const int K = gradient ? n + 1 : 1;
  LineFunctionK F = [&](const Vec& o, const Vec& d, std::span<double> v, std::span<double> e, SampleMeta&) {
    IntervalSet set = E.line_intervals(o, d);
    if (inside) set = interval_complement(set);
    RaySums r = ray_sums(set, h, M);
    if (gradient) {
      for (int i = 0; i < n; ++i) v[i] = d[i] * (r.pos1 - r.neg1);
      v[n] = s * (r.pos0 + r.neg0) - (n + s) * r.all2;
    } else {
      v[0] = r.pos0 + r.neg0;
    }
    for (int k = 0; k < K; ++k) e[k] = 0.0;
  };
  Vec axis = Vec::unit(n, n - 1);
  MultiEstimate m = integrate_lines_through_k(K, X.base, axis, F, features, spec, depth, gradient);
  const double a = closed_constant(ClosedConstantId::poisson_a, params);
  // Integrals of chi_S P and its derivatives, S = E or E^c.
  const double sign = inside ? -1.0 : 1.0;
  MultiEstimate out = m;
  if (!gradient) {
    out.value[0] = sign * (1.0 - 2.0 * a * m.value[0]);
    out.error[0] = 2.0 * a * m.error[0];
    return out;
  }
  for (int i = 0; i < n; ++i) {
    out.value[i] = -sign * 2.0 * a * (n + s) / h * m.value[i];
    out.error[i] = 2.0 * a * (n + s) / h * m.error[i];
  }
  out.value[n] = -sign * 2.0 * a / h * m.value[n];
  out.error[n] = 2.0 * a / h * m.error[n];
  return out;
}

}  // namespace

Estimate extend(const Region& E, const UpperHalfPoint& X, const FractionalParams& params, const QuadratureSpec& spec) {
  spec.validate();
  embed_check(X, params, "extension point");
  if (E.dim() != params.n) throw DomainError("extend: region dimension does not match params.n");
  Moments M(params);
  RegionFeatures f = collect_features(E);
  Estimate e = extension_components(E, X, params, spec, 0, M, f, false).component(0);
  e.value = std::clamp(e.value, -1.0, 1.0);
  return e;
}

std::vector<Estimate> extend_gradient(const Region& E, const UpperHalfPoint& X, const FractionalParams& params,
                                      const QuadratureSpec& spec) {
  spec.validate();
  embed_check(X, params, "extension point");
  if (E.dim() != params.n) throw DomainError("extend_gradient: region dimension does not match params.n");
  Moments M(params);
  RegionFeatures f = collect_features(E);
  MultiEstimate m = extension_components(E, X, params, spec, 0, M, f, true);
  std::vector<Estimate> g;
  for (int k = 0; k <= params.n; ++k) g.push_back(m.component(k));
  return g;
}

double halfspace_extension(const UpperHalfPoint& X, double s) {
  FractionalParams p(X.base.n, s);
  const int n = X.base.n;
  double tau = X.base[n - 1] / X.height;
  double h = tau >= 0 ? h_profile(tau, s) : -h_profile(-tau, s);
  return -closed_constant(ClosedConstantId::tilde_a, p) * h;
}

std::vector<double> halfspace_extension_gradient(const UpperHalfPoint& X, double s) {
  FractionalParams p(X.base.n, s);
  const int n = X.base.n;
  const double ta = closed_constant(ClosedConstantId::tilde_a, p);
  const double xn = X.base[n - 1], y = X.height;
  const double q = std::pow(xn * xn + y * y, -0.5 * (1 + s));
  std::vector<double> g(n + 1, 0.0);
  g[n - 1] = -ta * std::pow(y, s) * q;
  g[n] = ta * xn * std::pow(y, s - 1) * q;
  return g;
}

// ---------------------------------------------------------------- Phi

namespace {

using Density = std::function<Estimate(const Vec& base, double y)>;

// Integral of dens over the half-disc {(b,y) : b^2 + y^2 < L^2, y > 0} above the line o + b nu.
// The trace singularities at boundary crossings c_k are isolated in strips and integrated in polar
// coordinates (rho, phi) around each crossing with rho = rho_max w^{1/(1-s)}.
Estimate half_disc(const Vec& o, const Vec& nu, double L, std::vector<double> crossings, const Density& dens, double s,
                   const QuadratureSpec& spec, int depth) {
  std::sort(crossings.begin(), crossings.end());
  crossings.erase(std::unique(crossings.begin(), crossings.end()), crossings.end());
  if (crossings.empty()) crossings.push_back(0.0);
  std::vector<double> walls{-L};
  for (size_t k = 0; k + 1 < crossings.size(); ++k) walls.push_back(0.5 * (crossings[k] + crossings[k + 1]));
  walls.push_back(L);
  const double e = 1.0 / (1.0 - s);
  Estimate total = exact(0.0);
  total.work = 0;
  for (size_t k = 0; k < crossings.size(); ++k) {
    const double c = crossings[k], m0 = walls[k], m1 = walls[k + 1];
    const bool wall0 = m0 > -L, wall1 = m1 < L;
    std::vector<double> corners;
    for (double m : {m0, m1})
      if (std::abs(m) < L) corners.push_back(std::atan2(std::sqrt(L * L - m * m), m - c));
    auto rho_max = [&](double phi) {
      double cp = std::cos(phi), sp = std::sin(phi);
      double r = -c * cp + std::sqrt(std::max(0.0, L * L - c * c * sp * sp));
      if (cp > 0 && wall1) r = std::min(r, (m1 - c) / cp);
      if (cp < 0 && wall0) r = std::min(r, (m0 - c) / cp);
      return r;
    };
    auto angular = [&](double phi) {
      const double rm = rho_max(phi);
      if (!(rm > 0.0)) return exact(0.0);
      const double cp = std::cos(phi), sp = std::sin(phi);
      Options1D ow = options_from(spec, depth + 1);
      ow.parallel = false;
      for (double cj : crossings) {
        double dj = cj - c;
        if (dj != 0.0 && dj * cp > 0 && std::abs(dj) < rm) ow.breakpoints.push_back(std::pow(std::abs(dj) / rm, 1.0 / e));
      }
      return integrate_1d_nested(
          [&](double w) {
            if (w <= 0.0) return exact(0.0);
            double rho = rm * std::pow(w, e);
            double y = rho * sp;
            if (!(y > 0.0)) return exact(0.0);
            Estimate d = dens(o + (c + rho * cp) * nu, y);
            return (rho * rm * e * std::pow(w, e - 1.0)) * d;
          },
          0.0, 1.0, ow);
    };
    // The sin^{s-1} layer at phi = 0 and pi is absorbed by phi = (pi/2) v^{1/s} from either end.
    for (int side = 0; side < 2; ++side) {
      Options1D ov = options_from(spec, depth);
      for (double pc : corners) {
        double d = side == 0 ? pc : kPi - pc;
        if (d > 0.0 && d < 0.5 * kPi) ov.breakpoints.push_back(std::pow(d / (0.5 * kPi), s));
      }
      total = total + integrate_1d_nested(
                          [&](double v) {
                            if (!(v > 0.0)) return exact(0.0);
                            double d = 0.5 * kPi * std::pow(v, 1.0 / s);
                            return (0.5 * kPi / s * std::pow(v, 1.0 / s - 1.0)) * angular(side == 0 ? d : kPi - d);
                          },
                          0.0, 1.0, ov);
    }
  }
  return total;
}

std::vector<double> crossings_on(const Region& E, const Vec& o, const Vec& nu, double L) {
  std::vector<double> out;
  for (const auto& iv : E.line_intervals(o, nu)) {
    if (std::isfinite(iv.lo) && std::abs(iv.lo) < L) out.push_back(iv.lo);
    if (std::isfinite(iv.hi) && std::abs(iv.hi) < L) out.push_back(iv.hi);
  }
  return out;
}

// Closed-form density for half-spaces (and their complements), if E is one.
std::optional<std::pair<Vec, double>> as_half_space(const Region& E) {
  if (auto* h = std::get_if<shape::HalfSpace>(&E.shape())) return std::make_pair(h->normal, h->offset);
  if (auto* c = std::get_if<shape::Complement>(&E.shape()))
    if (auto* h = std::get_if<shape::HalfSpace>(&c->child->shape())) return std::make_pair(-1.0 * h->normal, -h->offset);
  return std::nullopt;
}

// Equator azimuths of the boundary rays when E (n = 2) is a cone with vertex at x: a half-plane
// with x on its edge, or a cross cone with x at its apex. Complements included.
std::optional<std::vector<double>> cone_rays(const Region& E, const Vec& x) {
  const Region* r = &E;
  if (auto* c = std::get_if<shape::Complement>(&E.shape())) r = c->child.get();
  std::vector<Vec> normals;
  const double tol = 1e-12 * std::max(1.0, norm(x));
  if (auto* h = std::get_if<shape::HalfSpace>(&r->shape())) {
    if (std::abs(dot(h->normal, x) - h->offset) > tol * norm(h->normal)) return std::nullopt;
    normals = {h->normal};
  } else if (auto* k = std::get_if<shape::CrossCone>(&r->shape())) {
    if (norm(x - k->apex) > tol) return std::nullopt;
    normals = {k->axis1, k->axis2};
  } else {
    return std::nullopt;
  }
  std::vector<double> psi;
  for (const Vec& a : normals)
    for (double sg : {1.0, -1.0}) {
      double q = std::atan2(sg * a[0], -sg * a[1]);
      psi.push_back(q < 0.0 ? q + 2.0 * kPi : q);
    }
  std::sort(psi.begin(), psi.end());
  return psi;
}

// U is 0-homogeneous about the apex of a cone, so the half-ball energy is R^{n-s}/(n-s) times the
// integral of y^{1-s}|grad U|^2 over the upper unit half-sphere. The sphere is parametrised by
// azimuth psi and elevation t; each boundary ray meets the equator at psi_k, where the same polar
// grading as in half_disc is used.
Estimate cone_sphere(const Vec& apex, const std::vector<double>& psi, const Density& dens, double s,
                     const QuadratureSpec& spec) {
  const double top = 0.5 * kPi, e = 1.0 / (1.0 - s);
  Estimate total = exact(0.0);
  total.work = 0;
  const size_t m = psi.size();
  for (size_t i = 0; i < m; ++i) {
    const double c = psi[i];
    const double lo = 0.5 * (c - (i == 0 ? psi[m - 1] - 2.0 * kPi : psi[i - 1]));
    const double hi = 0.5 * ((i + 1 == m ? psi[0] + 2.0 * kPi : psi[i + 1]) - c);
    const double corners[2] = {std::atan2(top, hi), std::atan2(top, -lo)};
    auto rho_max = [&](double phi) {
      double cp = std::cos(phi), sp = std::sin(phi), r = sp > 0.0 ? top / sp : kInf;
      if (cp > 0.0) r = std::min(r, hi / cp);
      if (cp < 0.0) r = std::min(r, -lo / cp);
      return r;
    };
    auto angular = [&](double phi) {
      const double rm = rho_max(phi), cp = std::cos(phi), sp = std::sin(phi);
      Options1D ow = options_from(spec, 1);
      ow.parallel = false;
      return integrate_1d_nested(
          [&](double w) {
            if (!(w > 0.0)) return exact(0.0);
            double rho = rm * std::pow(w, e);
            double t = rho * sp, a = c + rho * cp;
            if (!(t > 0.0)) return exact(0.0);
            Vec base = apex + std::cos(t) * Vec{std::cos(a), std::sin(a)};
            Estimate d = dens(base, std::sin(t));
            return (std::cos(t) * rho * rm * e * std::pow(w, e - 1.0)) * d;
          },
          0.0, 1.0, ow);
    };
    for (int side = 0; side < 2; ++side) {
      Options1D ov = options_from(spec, 0);
      for (double pc : corners) {
        double d = side == 0 ? pc : kPi - pc;
        if (d > 0.0 && d < 0.5 * kPi) ov.breakpoints.push_back(std::pow(d / (0.5 * kPi), s));
      }
      total = total + integrate_1d_nested(
                          [&](double v) {
                            if (!(v > 0.0)) return exact(0.0);
                            double d = 0.5 * kPi * std::pow(v, 1.0 / s);
                            return (0.5 * kPi / s * std::pow(v, 1.0 / s - 1.0)) * angular(side == 0 ? d : kPi - d);
                          },
                          0.0, 1.0, ov);
    }
  }
  return (1.0 / (2.0 - s)) * total;
}

}  // namespace

Estimate phi(const Region& E, const BoundaryProbe& probe, double R, const FractionalParams& params,
             const QuadratureSpec& spec, EnergyDensity density) {
  spec.validate();
  const int n = params.n;
  if (E.dim() != n) throw DomainError("phi: region dimension does not match params.n");
  require_same_dim(probe.point, n, "phi probe");
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("phi: R must be positive");
  const double s = params.s;
  auto hs = as_half_space(E);
  if (density == EnergyDensity::closed_form && !hs) throw DomainError("closed-form energy density needs a half-space");
  const bool closed = hs && density != EnergyDensity::convolution;

  Moments M(params);
  RegionFeatures feats = collect_features(E);
  const double ta = closed_constant(ClosedConstantId::tilde_a, params);
  // Depth taken by the slice levels (tangential offsets, phi, w).
  const int slice_depth = (n - 1) + 2;
  Density dens = [&](const Vec& base, double y) -> Estimate {
    if (closed) {
      double d = dot(base, hs->first) - hs->second;
      return exact(ta * ta * std::pow(y, s - 1.0) * std::pow(d * d + y * y, -s));
    }
    MultiEstimate m = extension_components(E, UpperHalfPoint(base, y), params, spec, slice_depth, M, feats, true);
    double w = std::pow(y, 1.0 - s), v = 0.0, err = 0.0;
    for (int k = 0; k <= n; ++k) {
      double g = m.value[k], eg = m.error[k];
      v += g * g;
      err += 2.0 * std::abs(g) * eg + eg * eg;
    }
    Estimate r;
    r.value = w * v;
    r.error_bound = w * err;
    r.work = m.work;
    r.status = m.status;
    return r;
  };

  if (n == 2 && !closed)
    if (auto rays = cone_rays(E, probe.point)) return cone_sphere(probe.point, *rays, dens, s, spec);

  Vec nu = hs ? normalized(hs->first) : probe.normal;
  if (!(norm(nu) > 0.5) && n == 2) {
    // Non-smooth probe: slice along the direction farthest in angle from every boundary line.
    std::vector<Vec> lines = feats.axes;
    for (const auto& m : feats.plane_normals) lines.push_back(Vec{-m[1], m[0]});
    double best = -1.0;
    for (int k = 0; k < 24; ++k) {
      Vec d{std::cos(kPi * k / 24), std::sin(kPi * k / 24)};
      double worst = 1.0;
      for (const auto& l : lines) worst = std::min(worst, std::abs(d[0] * l[1] - d[1] * l[0]) / norm(l));
      if (worst > best) best = worst, nu = d;
    }
  }
  if (!(norm(nu) > 0.5)) nu = Vec::unit(n, n - 1);
  nu = normalized(nu);
  const Vec x = probe.point;
  auto slice = [&](const Vec& offset, double L, int depth) {
    Vec o = x + offset;
    return half_disc(o, nu, L, crossings_on(E, o, nu, L), dens, s, spec, depth);
  };

  Estimate total;
  if (n == 1) {
    total = slice(Vec::zero(1), R, 0);
  } else if (n == 2) {
    Vec T{-nu[1], nu[0]};
    Options1D oa = options_from(spec, 0);
    oa.all_singular = true;
    // Offsets where a slice meets a vertex, touches a circle or runs along a boundary line.
    auto offset_break = [&](double a) {
      if (std::abs(a) < R) oa.breakpoints.push_back(a);
    };
    for (const auto& ap : feats.apexes) offset_break(dot(ap - x, T));
    for (const auto& sp : feats.spheres)
      for (double sg : {-1.0, 1.0}) offset_break(dot(sp.center - x, T) + sg * sp.radius);
    for (const auto& [m, off] : feats.planes)
      if (std::abs(dot(m, nu)) < 1e-12 * norm(m)) offset_break((off - dot(m, x)) / dot(m, T));
    const std::vector<double> offsets = oa.breakpoints;
    total = integrate_1d_nested(
        [&](double a) {
          double L = std::sqrt(std::max(0.0, R * R - a * a));
          if (!(L > 0.0)) return exact(0.0);
          // Nodes clustered at an offset breakpoint can sit within 1e-280 of it; the slice energy
          // is bounded there, so such slices are taken at 1e-10 R.
          for (double bp : offsets)
            if (std::abs(a - bp) < 1e-10 * R) a = bp + std::copysign(1e-10 * R, a - bp);
          return slice(a * T, L, 1);
        },
        -R, R, oa);
  } else {
    auto basis = orthonormal_complement(nu);
    Options1D orad = options_from(spec, 0);
    orad.all_singular = true;
    total = integrate_1d_nested(
        [&](double r) {
          double L = std::sqrt(std::max(0.0, R * R - r * r));
          if (!(L > 0.0) || !(r > 0.0)) return exact(0.0);
          Options1D og = options_from(spec, 1);
          og.parallel = false;
          return r * integrate_1d_nested(
                         [&](double g) {
                           Vec off = r * (std::cos(g) * basis[0] + std::sin(g) * basis[1]);
                           return slice(off, L, 2);
                         },
                         0.0, 2 * kPi, og);
        },
        0.0, R, orad);
  }
  return std::pow(R, -(n - s)) * total;
}

// ---------------------------------------------------------------- energy of general extensions

Estimate weighted_dirichlet_energy(const TestFunction& u, const FractionalParams& params, const QuadratureSpec& spec) {
  spec.validate();
  if (u.dim() != params.n) throw DomainError("weighted_dirichlet_energy: function dimension does not match params.n");
  if (params.n != 1) throw DomainError("weighted_dirichlet_energy is implemented for n = 1");
  if (u.is_constant()) {
    if (u(Vec{0.0}) == 0.0) return exact(0.0);
    throw DomainError("weighted_dirichlet_energy needs compactly supported data");
  }
  auto supp = u.support();
  if (!supp || u.indicator_region()) throw DomainError("weighted_dirichlet_energy needs smooth compactly supported data");
  if (!u.gradient(supp->center)) throw DomainError("weighted_dirichlet_energy needs a differentiable function");
  const double s = params.s;
  const double a = closed_constant(ClosedConstantId::poisson_a, params);
  const double A = supp->center[0] - supp->radius, B = supp->center[0] + supp->radius;
  const double Y = supp->radius;
  const double sup = u.sup_norm();
  auto hp = [&](double t) { return std::pow(1.0 + t * t, -0.5 * (1.0 + s)); };
  auto du = [&](double z) {
    auto g = u.gradient(Vec{z});
    return g ? (*g)[0] : 0.0;
  };

  // y^{1-s} |grad U|^2 at (x, y), symmetrized around x:
  // dU/dx = int_0^T P(t) (u'(x+t) + u'(x-t)) dt,
  // dU/dy = int_0^T dP/dy(t) (u(x+t) + u(x-t) - 2u(x)) dt - 2u(x) int_T^inf dP/dy,
  // with T the distance from x to the far end of the support.
  auto density = [&](double x, double y, int depth) -> Estimate {
    const double ux = u(Vec{x});
    const double T = std::max(std::abs(x - A), std::abs(B - x));
    Options1D ot = options_from(spec, depth);
    ot.parallel = false;
    // Roundoff floor of the second difference against |dP/dy| ~ 1/y.
    ot.abs_tol = std::max(ot.abs_tol, 1e3 * std::numeric_limits<double>::epsilon() * a * sup / y);
    for (double k : {1.0, 10.0, 100.0, 1000.0})
      if (k * y < T) ot.breakpoints.push_back(k * y);
    for (double d : {x - A, B - x})
      if (d > 0.0 && d < T) ot.breakpoints.push_back(d);
    std::sort(ot.breakpoints.begin(), ot.breakpoints.end());
    MultiIntegrand f = [&](double t, std::span<double> v, std::span<double>, SampleMeta&) {
      double D = t * t + y * y;
      double P = a * std::pow(y, s) * std::pow(D, -0.5 * (1 + s));
      double dyP = a * (s * std::pow(y, s - 1) * std::pow(D, -0.5 * (1 + s)) -
                        (1 + s) * std::pow(y, s + 1) * std::pow(D, -0.5 * (3 + s)));
      v[0] = P * (du(x + t) + du(x - t));
      v[1] = dyP * (u(Vec{x + t}) + u(Vec{x - t}) - 2.0 * ux);
    };
    MultiEstimate m = integrate_1d_multi(2, f, 0.0, T, ot);
    double gx = m.value[0], gy = m.value[1] - 2.0 * ux * a * T * hp(T / y) / (y * y);
    double ex = m.error[0], ey = m.error[1];
    double w = std::pow(y, 1.0 - s);
    Estimate r;
    r.value = w * (gx * gx + gy * gy);
    r.error_bound = w * (2 * std::abs(gx) * ex + ex * ex + 2 * std::abs(gy) * ey + ey * ey);
    r.work = m.work;
    r.status = m.status;
    return r;
  };

  // Polar coordinates around the support centre. The y^{s-1} layer at the trace is absorbed by
  // phi = (pi/2) v^{1/s} near both ends, which keeps the sampled heights away from roundoff.
  const double c = 0.5 * (A + B);
  auto ray = [&](double ph) {
    const double cp = std::cos(ph), sp = std::sin(ph);
    Options1D orr = options_from(spec, 1);
    orr.parallel = false;
    orr.breakpoints.push_back(Y);
    orr.scale = Y;
    return integrate_1d_nested(
        [&](double r) {
          double y = r * sp;
          if (!(r > 0.0) || !(y > 0.0)) return exact(0.0);
          return r * density(c + r * cp, y, 2);
        },
        0.0, kInf, orr);
  };
  Options1D ov = options_from(spec, 0);
  return integrate_1d_nested(
      [&](double v) {
        if (!(v > 0.0)) return exact(0.0);
        double ph = 0.5 * kPi * std::pow(v, 1.0 / s);
        Estimate jac = exact(0.5 * kPi / s * std::pow(v, 1.0 / s - 1.0));
        Estimate both = ray(ph) + ray(kPi - ph);
        return jac.value * both;
      },
      0.0, 1.0, ov);
}

}  // namespace fracsurf
