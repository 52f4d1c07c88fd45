#include <cmath>
#include <limits>
#include <numbers>

#include "fracsurf/errors.hpp"
#include "fracsurf/lines.hpp"
#include "fracsurf/quadrature.hpp"

namespace fracsurf {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

// Monte Carlo over lines meeting a window: uniform direction in the half sphere, uniform offset in the disk.
Estimate monte_carlo_lines(const Window& w, const LineFunction& F, const QuadratureSpec& spec) {
  const int n = w.center.n;
  if (n == 1) {
    Estimate e;
    e.value = F(w.center, Vec{1.0});
    e.work = 1;
    return e;
  }
  if (n == 2) {
    return monte_carlo(
        [&](const double* u, int) {
          double a = kPi * u[0];
          Vec theta{std::cos(a), std::sin(a)};
          Vec nrm{-theta[1], theta[0]};
          return F(w.center + (w.radius * (2 * u[1] - 1)) * nrm, theta);
        },
        2, kPi * 2 * w.radius, spec);
  }
  return monte_carlo(
      [&](const double* u, int) {
        double z = u[0], sz = std::sqrt(std::max(0.0, 1 - z * z)), g = 2 * kPi * u[1];
        Vec theta{sz * std::cos(g), sz * std::sin(g), z};
        Vec e1{-std::sin(g), std::cos(g), 0.0};
        Vec e2{theta[1] * e1[2] - theta[2] * e1[1], theta[2] * e1[0] - theta[0] * e1[2],
               theta[0] * e1[1] - theta[1] * e1[0]};
        double q = w.radius * std::sqrt(u[2]), om = 2 * kPi * u[3];
        return F(w.center + q * (std::cos(om) * e1 + std::sin(om) * e2), theta);
      },
      4, 2 * kPi * kPi * w.radius * w.radius, spec);
}

Estimate monte_carlo_lines_through(const Vec& x, const Vec& axis, const LineFunction& F, const QuadratureSpec& spec) {
  const int n = x.n;
  if (n == 1) {
    Estimate e;
    e.value = F(x, Vec{1.0});
    e.work = 1;
    return e;
  }
  if (n == 2) {
    Vec T{axis[1], -axis[0]};
    return monte_carlo(
        [&](const double* u, int) {
          double a = kPi * u[0];
          return F(x, std::cos(a) * T + std::sin(a) * axis);
        },
        1, kPi, spec);
  }
  auto basis = orthonormal_complement(axis);
  return monte_carlo(
      [&](const double* u, int) {
        double w = u[0], sw = std::sqrt(std::max(0.0, 1 - w * w)), g = 2 * kPi * u[1];
        return F(x, sw * std::cos(g) * basis[0] + sw * std::sin(g) * basis[1] + w * axis);
      },
      2, 2 * kPi, spec);
}

Estimate interaction_integral(const Region& A, const Region& B, const std::optional<Window>& window,
                              const FractionalParams& params, const QuadratureSpec& spec) {
  spec.validate();
  if (A.dim() != B.dim() || A.dim() != params.n) throw DomainError("interaction_integral: dimension mismatch");
  std::optional<Window> lines;
  if (window) {
    require_same_dim(window->center, params.n, "interaction window");
    lines = *window;
  } else {
    auto a = A.bounding_ball(), b = B.bounding_ball();
    if (a && b)
      lines = a->radius <= b->radius ? a : b;
    else
      lines = a ? a : b;
  }
  if (!lines) return flagged_estimate(Status::budget_exhausted);
  RegionFeatures feats = collect_features(A);
  merge_features(feats, collect_features(B));
  if (window) feats.spheres.push_back(*window);
  std::optional<Region> clip;
  if (window) clip = Region::ball(window->center, window->radius);
  const double s = params.s;
  LineFunction F = [&](const Vec& o, const Vec& d) {
    IntervalSet a = A.line_intervals(o, d);
    IntervalSet b = B.line_intervals(o, d);
    if (clip) {
      IntervalSet ch = clip->line_intervals(o, d);
      a = interval_intersection(a, ch);
      b = interval_intersection(b, ch);
    }
    if (a.empty() || b.empty()) return 0.0;
    return pair_interaction(a, b, s);
  };
  if (spec.method == Method::montecarlo) return monte_carlo_lines(*lines, F, spec);
  return integrate_lines(*lines, F, feats, spec);
}

Estimate pv_kernel_integral(const Region& E, const BoundaryProbe& probe, const FractionalParams& params,
                            const QuadratureSpec& spec) {
  spec.validate();
  const int n = params.n;
  if (E.dim() != n) throw DomainError("pv_kernel_integral: dimension mismatch");
  require_same_dim(probe.point, n, "probe");
  const Vec x = probe.point;
  Vec axis = probe.smooth && norm(probe.normal) > 0 ? probe.normal : Vec::unit(n, n - 1);
  if (!probe.smooth && n == 2) axis = Vec{std::sin(0.37), std::cos(0.37)};
  const double pin = 1e-12 * std::max(1.0, norm(x));
  const double snap = 0.0;
  const double s = params.s;
  RegionFeatures feats = collect_features(E);
  const double half_sphere = n == 1 ? 1.0 : 0.5 * sphere_area(n);
  // A line that lies in the tangent plane up to rounding never crosses the boundary at the probe.
  // Such directions are a null set and are dropped.
  const bool smooth = probe.smooth && norm(probe.normal) > 0;
  auto line_pv = [&](const Vec& o, const Vec& d) {
    LinePV r = pv_line(E.line_intervals(o, d, pin), s, snap);
    if (smooth && r.divergent != 0.0 && std::abs(dot(d, axis)) <= 64 * std::numeric_limits<double>::epsilon())
      return LinePV{};
    return r;
  };

  double d_value, d_error;
  Estimate fp;
  if (spec.method == Method::montecarlo) {
    LineFunction Ffp = [&](const Vec& o, const Vec& d) { return line_pv(o, d).finite_part; };
    LineFunction Fd = [&](const Vec& o, const Vec& d) { return line_pv(o, d).divergent; };
    fp = monte_carlo_lines_through(x, axis, Ffp, spec);
    Estimate dv = monte_carlo_lines_through(x, axis, Fd, spec);
    d_value = dv.value;
    d_error = dv.error_bound;
  } else {
    LineFunctionK F = [&](const Vec& o, const Vec& d, std::span<double> v, std::span<double>, SampleMeta&) {
      LinePV r = line_pv(o, d);
      v[0] = r.finite_part;
      v[1] = r.divergent;
    };
    MultiEstimate m = integrate_lines_through_k(2, x, axis, F, feats, spec);
    fp = m.component(0);
    d_value = m.value[1];
    d_error = m.error[1];
  }
  if (std::abs(d_value) > std::max(d_error, 1e-9 * half_sphere)) {
    Estimate e = flagged_estimate(Status::non_convergent);
    e.work = fp.work;
    e.kind = fp.kind;
    return e;
  }
  return fp;
}

}  // namespace fracsurf
