#include "fracsurf/fracperim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracsurf/errors.hpp"
#include "fracsurf/lines.hpp"

namespace fracsurf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Radius beyond which a unit-width Gaussian is below 1e-18.
const double kGaussCut = std::sqrt(18.0 * std::log(10.0));

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sampled_value(const fn::Sampled& f, double x) {
  if (!(x > f.lo && x < f.hi)) return 0.0;
  const int m = static_cast<int>(f.values.size()) - 1;
  double u = (x - f.lo) / (f.hi - f.lo) * m;
  int i = std::min(m - 1, static_cast<int>(u));
  double w = u - i;
  return (1 - w) * f.values[i] + w * f.values[i + 1];
}

// Parameters t with |o + t d - c| = r.
std::vector<double> sphere_hits(const Vec& o, const Vec& d, const Vec& c, double r) {
  Vec w = o - c;
  double A = norm2(d), B = dot(d, w), C = norm2(w) - r * r;
  double disc = B * B - A * C;
  if (disc <= 0.0 || A == 0.0) return {};
  double sq = std::sqrt(disc);
  return {(-B - sq) / A, (-B + sq) / A};
}

// Points on the line o + t d where u loses smoothness or its support ends.
std::vector<double> kinks(const TestFunction& u, const Vec& o, const Vec& d) {
  return std::visit(
      overloaded{
          [&](const fn::Bump& b) { return sphere_hits(o, d, b.center, b.radius); },
          [&](const fn::Indicator& ind) {
            std::vector<double> out;
            for (const auto& iv : ind.region.line_intervals(o, d)) {
              if (std::isfinite(iv.lo)) out.push_back(iv.lo);
              if (std::isfinite(iv.hi)) out.push_back(iv.hi);
            }
            return out;
          },
          [&](const fn::RadialPower&) {
            std::vector<double> out;
            double t = -dot(o, d) / norm2(d);
            if (norm(o + t * d) < 1e-12 * std::max(1.0, norm(o))) out.push_back(t);
            return out;
          },
          [&](const fn::Sampled& f) {
            std::vector<double> out;
            const int m = static_cast<int>(f.values.size()) - 1;
            if (d[0] == 0.0) return out;
            for (int i = 0; i <= m; ++i) out.push_back((f.lo + (f.hi - f.lo) * i / m - o[0]) / d[0]);
            return out;
          },
          [&](const fn::Custom& f) {
            if (f.support) return sphere_hits(o, d, f.support->center, f.support->radius);
            return std::vector<double>{};
          },
          [&](const fn::Rescaled& r) { return kinks(*r.child, r.scale * o + r.translate, r.scale * d); },
          [&](const fn::Kelvin& k) {
            auto out = sphere_hits(o, d, Vec::zero(o.n), 1.0);
            for (double t : kinks(*k.child, o, d))
              if (norm(o + t * d) <= 1.0) out.push_back(t);
            return out;
          },
          [&](const auto&) { return std::vector<double>{}; },
      },
      u.descriptor());
}

// Parameters t_c about which u restricted to the line is even; |g(t+r) - g(t)| has a kink at t+r = 2 t_c - t.
std::vector<double> mirror_points(const TestFunction& u, const Vec& o, const Vec& d) {
  auto foot = [&](const Vec& c) { return std::vector<double>{dot(c - o, d) / norm2(d)}; };
  return std::visit(overloaded{
                        [&](const fn::Bump& b) { return foot(b.center); },
                        [&](const fn::Gaussian& g) { return foot(g.center); },
                        [&](const fn::RadialPower&) { return foot(Vec::zero(o.n)); },
                        [&](const fn::Rescaled& r) { return mirror_points(*r.child, r.scale * o + r.translate, r.scale * d); },
                        [&](const fn::Kelvin& k) {
                          auto m = mirror_points(*k.child, o, d);
                          auto z = foot(Vec::zero(o.n));
                          if (!m.empty() && std::abs(m[0] - z[0]) < 1e-14 * (1.0 + std::abs(z[0]))) return z;
                          return std::vector<double>{};
                        },
                        [&](const auto&) { return std::vector<double>{}; },
                    },
                    u.descriptor());
}

std::optional<Interval> ball_chord(const Window& w, const Vec& o, const Vec& d) {
  auto h = sphere_hits(o, d, w.center, w.radius);
  if (h.empty()) return std::nullopt;
  return Interval{h[0], h[1]};
}

Estimate exact(double v) {
  Estimate e;
  e.value = v;
  e.work = 1;
  return e;
}

Estimate guarded(const std::function<Estimate()>& body) {
  try {
    return body();
  } catch (const DivergenceError&) {
    return flagged_estimate(Status::divergent);
  }
}

// Nesting depth taken by the line-space outer levels.
int line_depth(int n) { return 2 * (n - 1); }

// 2 int_a^b dt int_0^{b-t} |g(t+r)-g(t)|^p r^{-1-q} dr, i.e. the double integral over (a,b)^2.
// The inner variable is r = (b-t) w^{1/(p-q)}, which makes r^{p-1-q} dr regular.
Estimate chord_double(const std::function<double(double)>& g, double a, double b, double p, double q,
                      const std::vector<double>& kink, const std::vector<double>& mirror, const QuadratureSpec& spec,
                      int depth) {
  if (!(b > a)) return exact(0.0);
  const double e = 1.0 / (p - q);
  Options1D ot = options_from(spec, depth);
  ot.parallel = ot.parallel && depth == 0;
  for (double k : kink)
    if (k > a && k < b) ot.breakpoints.push_back(k);
  for (double c : mirror)
    if (c > a && c < b) ot.breakpoints.push_back(c);
  return integrate_1d_nested(
      [&](double t) {
        double L = b - t;
        if (!(L > 0.0)) return exact(0.0);
        const double gt = g(t);
        Options1D orr = options_from(spec, depth + 1);
        orr.parallel = false;
        for (double k : kink)
          if (k > t && k < b) orr.breakpoints.push_back(std::pow((k - t) / L, 1.0 / e));
        for (double c : mirror)
          if (c > t && 2 * c - t < b) orr.breakpoints.push_back(std::pow((2 * (c - t)) / L, 1.0 / e));
        return integrate_1d(
            [&](double w) {
              if (w <= 0.0) return 0.0;
              double r = L * std::pow(w, e);
              if (!(r > 0.0)) return 0.0;
              double diff = std::abs(g(t + r) - gt);
              if (diff == 0.0) return 0.0;
              // |diff|^p r^{-1-q} dr with dr = L e w^{e-1} dw and r^{-1-q} = (L w^e)^{-1-q}.
              return 2.0 * std::pow(diff, p) * std::pow(r, -1.0 - q) * L * e * std::pow(w, e - 1.0);
            },
            0.0, 1.0, orr);
      },
      a, b, ot);
}

// 2 int_a^b |g(t)|^p [(t-a)^{-q} + (b-t)^{-q}]/q dt: pairs with one point in (a,b) and g = 0 outside.
Estimate chord_outside_compact(const std::function<double(double)>& g, double a, double b, double p, double q,
                               const QuadratureSpec& spec, int depth) {
  if (!(b > a)) return exact(0.0);
  Options1D o = options_from(spec, depth);
  o.all_singular = true;
  o.parallel = o.parallel && depth == 0;
  return integrate_1d(
      [&](double t) {
        double gt = std::abs(g(t));
        if (gt == 0.0) return 0.0;
        double da = t - a, db = b - t;
        if (!(da > 0.0) || !(db > 0.0)) return 0.0;
        return 2.0 * std::pow(gt, p) * (std::pow(da, -q) + std::pow(db, -q)) / q;
      },
      a, b, o);
}

// 2 int_R dt int_0^inf |g(t+r)-g(t)|^p r^{-1-q} dr for a bounded, decaying g (n = 1, unbounded support).
Estimate line_full(const std::function<double(double)>& g, double p, double q, const std::vector<double>& kink,
                   const std::vector<double>& mirror, const QuadratureSpec& spec, int depth) {
  const double e = 1.0 / (p - q);
  Options1D ot = options_from(spec, depth);
  ot.breakpoints = kink;
  ot.breakpoints.insert(ot.breakpoints.end(), mirror.begin(), mirror.end());
  return integrate_1d_nested(
      [&](double t) {
        const double gt = g(t);
        double r1 = 1.0;
        for (double k : kink)
          if (k > t) r1 = std::min(r1, k - t);
        for (double c : mirror)
          if (c > t) r1 = std::min(r1, 2 * (c - t));
        Options1D o1 = options_from(spec, depth + 1);
        o1.parallel = false;
        Estimate head = integrate_1d(
            [&](double w) {
              if (w <= 0.0) return 0.0;
              double r = r1 * std::pow(w, e);
              if (!(r > 0.0)) return 0.0;
              double diff = std::abs(g(t + r) - gt);
              if (diff == 0.0) return 0.0;
              return 2.0 * std::pow(diff, p) * std::pow(r, -1.0 - q) * r1 * e * std::pow(w, e - 1.0);
            },
            0.0, 1.0, o1);
        Options1D o2 = options_from(spec, depth + 1);
        o2.parallel = false;
        for (double k : kink)
          if (k - t > r1) o2.breakpoints.push_back(k - t);
        for (double c : mirror)
          if (2 * (c - t) > r1) o2.breakpoints.push_back(2 * (c - t));
        o2.scale = std::max(1.0, r1);
        Estimate tail = integrate_1d(
            [&](double r) {
              double diff = std::abs(g(t + r) - gt);
              if (diff == 0.0) return 0.0;
              return 2.0 * std::pow(diff, p) * std::pow(r, -1.0 - q);
            },
            r1, kInf, o2);
        return head + tail;
      },
      -kInf, kInf, ot);
}


}  // namespace

// ---------------------------------------------------------------- TestFunction

TestFunction TestFunction::constant(int n, double c) {
  Vec::zero(n);
  return TestFunction(n, fn::Constant{c});
}

TestFunction TestFunction::bump(Vec center, double radius, double height) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  int n = center.n;
  return TestFunction(n, fn::Bump{center, radius, height});
}

TestFunction TestFunction::gaussian(Vec center, double width) {
  if (!(width > 0.0)) throw DomainError("gaussian width must be positive");
  int n = center.n;
  return TestFunction(n, fn::Gaussian{center, width});
}

TestFunction TestFunction::indicator(Region region) {
  int n = region.dim();
  return TestFunction(n, fn::Indicator{std::move(region)});
}

TestFunction TestFunction::radial_power(int n, double exponent) {
  Vec::zero(n);
  if (!std::isfinite(exponent)) throw DomainError("radial power exponent must be finite");
  return TestFunction(n, fn::RadialPower{exponent});
}

TestFunction TestFunction::affine(Vec coeffs, double offset) {
  int n = coeffs.n;
  return TestFunction(n, fn::Affine{coeffs, offset});
}

TestFunction TestFunction::sampled(double lo, double hi, std::vector<double> values) {
  if (!(hi > lo)) throw DomainError("sampled function needs lo < hi");
  if (values.size() < 2) throw DomainError("sampled function needs at least two values");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("sampled values must be finite");
  return TestFunction(1, fn::Sampled{lo, hi, std::move(values)});
}

TestFunction TestFunction::custom(int n, std::function<double(const Vec&)> f, double sup, std::optional<Window> support,
                                  std::string name) {
  Vec::zero(n);
  if (!f) throw DomainError("custom function is empty");
  return TestFunction(n, fn::Custom{std::move(f), sup, support, std::move(name)});
}

TestFunction TestFunction::rescaled(double scale, const Vec& translate) const {
  if (!(scale > 0.0)) throw DomainError("rescale factor must be positive");
  require_same_dim(translate, dim_, "rescale translation");
  return TestFunction(dim_, fn::Rescaled{std::make_shared<const TestFunction>(*this), scale, translate});
}

TestFunction kelvin_extend(const TestFunction& u) {
  return TestFunction(u.dim(), fn::Kelvin{std::make_shared<const TestFunction>(u)});
}

double TestFunction::operator()(const Vec& x) const {
  return std::visit(
      overloaded{
          [&](const fn::Constant& f) { return f.c; },
          [&](const fn::Bump& f) {
            double q = norm2(x - f.center) / (f.radius * f.radius);
            return q < 1.0 ? f.height * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
          },
          [&](const fn::Gaussian& f) { return std::exp(-norm2(x - f.center) / (f.width * f.width)); },
          [&](const fn::Indicator& f) { return f.region.contains(x) ? 1.0 : 0.0; },
          [&](const fn::RadialPower& f) { return f.exponent == 0.0 ? 1.0 : std::pow(norm(x), f.exponent); },
          [&](const fn::Affine& f) { return dot(f.coeffs, x) + f.offset; },
          [&](const fn::Sampled& f) { return sampled_value(f, x[0]); },
          [&](const fn::Custom& f) { return f.f(x); },
          [&](const fn::Rescaled& f) { return (*f.child)(f.scale * x + f.translate); },
          [&](const fn::Kelvin& f) {
            double r2 = norm2(x);
            return r2 <= 1.0 ? (*f.child)(x) : (*f.child)((1.0 / r2) * x);
          },
      },
      *desc_);
}

std::optional<Vec> TestFunction::gradient(const Vec& x) const {
  return std::visit(
      overloaded{
          [&](const fn::Constant&) -> std::optional<Vec> { return Vec::zero(dim_); },
          [&](const fn::Bump& f) -> std::optional<Vec> {
            Vec d = x - f.center;
            double q = norm2(d) / (f.radius * f.radius);
            if (q >= 1.0) return Vec::zero(dim_);
            double u = f.height * std::exp(1.0 - 1.0 / (1.0 - q));
            return (-u / ((1.0 - q) * (1.0 - q)) * 2.0 / (f.radius * f.radius)) * d;
          },
          [&](const fn::Gaussian& f) -> std::optional<Vec> {
            Vec d = x - f.center;
            double u = std::exp(-norm2(d) / (f.width * f.width));
            return (-2.0 * u / (f.width * f.width)) * d;
          },
          [&](const fn::Indicator&) -> std::optional<Vec> { return std::nullopt; },
          [&](const fn::RadialPower& f) -> std::optional<Vec> {
            double r = norm(x);
            if (f.exponent == 0.0) return Vec::zero(dim_);
            if (r == 0.0) return f.exponent >= 1.0 ? std::optional<Vec>(Vec::zero(dim_)) : std::nullopt;
            return (f.exponent * std::pow(r, f.exponent - 2.0)) * x;
          },
          [&](const fn::Affine& f) -> std::optional<Vec> { return f.coeffs; },
          [&](const fn::Sampled& f) -> std::optional<Vec> {
            if (!(x[0] > f.lo && x[0] < f.hi)) return Vec{0.0};
            const int m = static_cast<int>(f.values.size()) - 1;
            double h = (f.hi - f.lo) / m;
            int i = std::min(m - 1, static_cast<int>((x[0] - f.lo) / h));
            return Vec{(f.values[i + 1] - f.values[i]) / h};
          },
          [&](const fn::Custom&) -> std::optional<Vec> { return std::nullopt; },
          [&](const fn::Rescaled& f) -> std::optional<Vec> {
            auto g = f.child->gradient(f.scale * x + f.translate);
            if (!g) return std::nullopt;
            return f.scale * *g;
          },
          [&](const fn::Kelvin& f) -> std::optional<Vec> {
            double r2 = norm2(x);
            if (r2 <= 1.0) return f.child->gradient(x);
            auto g = f.child->gradient((1.0 / r2) * x);
            if (!g) return std::nullopt;
            Vec xh = (1.0 / std::sqrt(r2)) * x;
            return (1.0 / r2) * (*g - (2.0 * dot(xh, *g)) * xh);
          },
      },
      *desc_);
}

double TestFunction::sup_norm() const {
  return std::visit(
      overloaded{
          [&](const fn::Constant& f) { return std::abs(f.c); },
          [&](const fn::Bump& f) { return std::abs(f.height); },
          [&](const fn::Gaussian&) { return 1.0; },
          [&](const fn::Indicator&) { return 1.0; },
          [&](const fn::RadialPower& f) { return f.exponent == 0.0 ? 1.0 : kInf; },
          [&](const fn::Affine& f) { return norm(f.coeffs) == 0.0 ? std::abs(f.offset) : kInf; },
          [&](const fn::Sampled& f) {
            double m = 0.0;
            for (double v : f.values) m = std::max(m, std::abs(v));
            return m;
          },
          [&](const fn::Custom& f) { return f.sup; },
          [&](const fn::Rescaled& f) { return f.child->sup_norm(); },
          [&](const fn::Kelvin& f) { return f.child->sup_over(Window(Vec::zero(dim_), 1.0)); },
      },
      *desc_);
}

double TestFunction::sup_over(const Window& ball) const {
  require_same_dim(ball.center, dim_, "sup ball");
  return std::visit(
      overloaded{
          [&](const fn::Gaussian& f) {
            double d = std::max(0.0, norm(ball.center - f.center) - ball.radius);
            return std::exp(-d * d / (f.width * f.width));
          },
          [&](const fn::RadialPower& f) {
            double c = norm(ball.center);
            if (f.exponent > 0.0) return std::pow(c + ball.radius, f.exponent);
            if (f.exponent == 0.0) return 1.0;
            double d = c - ball.radius;
            return d > 0.0 ? std::pow(d, f.exponent) : kInf;
          },
          [&](const fn::Affine& f) { return std::abs(dot(f.coeffs, ball.center) + f.offset) + norm(f.coeffs) * ball.radius; },
          [&](const fn::Rescaled& f) {
            return f.child->sup_over(Window(f.scale * ball.center + f.translate, f.scale * ball.radius));
          },
          [&](const auto&) { return sup_norm(); },
      },
      *desc_);
}

std::optional<Window> TestFunction::support() const {
  return std::visit(
      overloaded{
          [&](const fn::Bump& f) -> std::optional<Window> { return Window(f.center, f.radius); },
          [&](const fn::Gaussian& f) -> std::optional<Window> { return Window(f.center, kGaussCut * f.width); },
          [&](const fn::Indicator& f) -> std::optional<Window> { return f.region.bounding_ball(); },
          [&](const fn::Sampled& f) -> std::optional<Window> {
            return Window(Vec{0.5 * (f.lo + f.hi)}, 0.5 * (f.hi - f.lo));
          },
          [&](const fn::Custom& f) -> std::optional<Window> { return f.support; },
          [&](const fn::Rescaled& f) -> std::optional<Window> {
            auto s = f.child->support();
            if (!s) return std::nullopt;
            return Window((1.0 / f.scale) * (s->center - f.translate), s->radius / f.scale);
          },
          [&](const fn::Kelvin& f) -> std::optional<Window> {
            auto s = f.child->support();
            if (!s) return std::nullopt;
            double c = norm(s->center);
            if (c + s->radius > 1.0 || c - s->radius <= 0.0) return std::nullopt;
            return Window(Vec::zero(dim_), 1.0 / (c - s->radius));
          },
          [&](const auto&) -> std::optional<Window> { return std::nullopt; },
      },
      *desc_);
}

bool TestFunction::is_constant() const {
  return std::visit(overloaded{
                        [&](const fn::Constant&) { return true; },
                        [&](const fn::Affine& f) { return norm(f.coeffs) == 0.0; },
                        [&](const fn::RadialPower& f) { return f.exponent == 0.0; },
                        [&](const fn::Rescaled& f) { return f.child->is_constant(); },
                        [&](const fn::Kelvin& f) { return f.child->is_constant(); },
                        [&](const auto&) { return false; },
                    },
                    *desc_);
}

const Region* TestFunction::indicator_region() const {
  if (auto* ind = std::get_if<fn::Indicator>(desc_.get())) return &ind->region;
  return nullptr;
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os.precision(12);
  auto vec = [&](const Vec& v) {
    os << "(";
    for (int i = 0; i < v.n; ++i) os << (i ? "," : "") << v[i];
    os << ")";
  };
  std::visit(overloaded{
                 [&](const fn::Constant& f) { os << "constant(" << f.c << ")"; },
                 [&](const fn::Bump& f) {
                   os << "bump(center=";
                   vec(f.center);
                   os << ", radius=" << f.radius << ", height=" << f.height << ")";
                 },
                 [&](const fn::Gaussian& f) {
                   os << "gaussian(center=";
                   vec(f.center);
                   os << ", width=" << f.width << ")";
                 },
                 [&](const fn::Indicator& f) { os << "indicator(" << f.region.describe() << ")"; },
                 [&](const fn::RadialPower& f) { os << "radial_power(" << f.exponent << ")"; },
                 [&](const fn::Affine& f) {
                   os << "affine(coeffs=";
                   vec(f.coeffs);
                   os << ", offset=" << f.offset << ")";
                 },
                 [&](const fn::Sampled& f) {
                   os << "sampled([" << f.lo << "," << f.hi << "], " << f.values.size() << " values)";
                 },
                 [&](const fn::Custom& f) { os << f.name; },
                 [&](const fn::Rescaled& f) {
                   os << "rescaled(" << f.child->describe() << ", scale=" << f.scale << ", translate=";
                   vec(f.translate);
                   os << ")";
                 },
                 [&](const fn::Kelvin& f) { os << "kelvin(" << f.child->describe() << ")"; },
             },
             *desc_);
  return os.str();
}

// ---------------------------------------------------------------- parameters

SeminormParams::SeminormParams(double a, double pp) : alpha(a), p(pp) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("seminorm alpha must lie in (0,1)");
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("seminorm p must satisfy 1 <= p < inf");
}

double SeminormParams::p_star(int n) const {
  double d = n - alpha * p;
  return d > 0.0 ? n * p / d : kInf;
}

InterpolationParams::InterpolationParams(double e, double r, double ss) : epsilon(e), R(r), s(ss) {
  FractionalParams(1, s);
  if (!(epsilon > 0.0 && epsilon < std::pow(3.0, -1.0 / s)))
    throw DomainError("epsilon must lie in (0, 3^{-1/s})");
  if (!(R > 0.0)) throw DomainError("R must be positive");
}

// ---------------------------------------------------------------- perimeter and curvature

const char* to_string(PerimeterForm f) { return f == PerimeterForm::three_term ? "three_term" : "q_form"; }

Estimate per_s(const Region& E, const Window& window, const FractionalParams& params, const QuadratureSpec& spec,
               PerimeterForm form) {
  spec.validate();
  if (E.dim() != params.n) throw DomainError("per_s: region dimension does not match params.n");
  require_same_dim(window.center, params.n, "per_s window");
  if (std::holds_alternative<shape::Empty>(E.shape())) return exact(0.0);
  const double s = params.s;
  LineFunction F = [&](const Vec& o, const Vec& d) -> double {
    auto ch = ball_chord(window, o, d);
    if (!ch) return 0.0;
    IntervalSet e = E.line_intervals(o, d);
    if (form == PerimeterForm::q_form) return q_form_line(e, *ch, s);
    IntervalSet W{*ch}, ec = interval_complement(e);
    IntervalSet A = interval_intersection(e, W), B = interval_intersection(ec, W);
    IntervalSet C = interval_difference(ec, W), D = interval_difference(e, W);
    double v = 0.0;
    if (!A.empty() && !B.empty()) v += pair_interaction(A, B, s);
    if (!A.empty() && !C.empty()) v += pair_interaction(A, C, s);
    if (!D.empty() && !B.empty()) v += pair_interaction(D, B, s);
    return v;
  };
  return guarded([&] {
    if (spec.method == Method::montecarlo) return monte_carlo_lines(window, F, spec);
    RegionFeatures feats = collect_features(E);
    feats.spheres.push_back(window);
    return integrate_lines(window, F, feats, spec);
  });
}

Estimate mean_curvature_s(const Region& E, const BoundaryProbe& probe, const FractionalParams& params,
                          const QuadratureSpec& spec) {
  return pv_kernel_integral(E, probe, params, spec);
}

// ---------------------------------------------------------------- Gagliardo seminorms

namespace {

// [chi_E]^p over the domain: 2 I_q(E, E^c) restricted to the domain.
Estimate indicator_gagliardo(const Region& E, double q, const SeminormDomain& domain, const QuadratureSpec& spec) {
  if (q >= 1.0) return flagged_estimate(Status::divergent);
  const int n = E.dim();
  std::optional<Window> lines;
  std::optional<Window> clip;
  if (auto* w = std::get_if<Window>(&domain)) {
    lines = *w;
    clip = *w;
  } else {
    lines = E.bounding_ball();
    if (!lines) lines = E.complement_bounding_ball();
    if (!lines) return flagged_estimate(Status::divergent);
  }
  LineFunction F = [&](const Vec& o, const Vec& d) -> double {
    IntervalSet e = E.line_intervals(o, d);
    IntervalSet ec = interval_complement(e);
    if (clip) {
      auto ch = ball_chord(*clip, o, d);
      if (!ch) return 0.0;
      IntervalSet W{*ch};
      e = interval_intersection(e, W);
      ec = interval_intersection(ec, W);
    }
    if (e.empty() || ec.empty()) return 0.0;
    return 2.0 * pair_interaction(e, ec, q);
  };
  return guarded([&] {
    if (spec.method == Method::montecarlo) return monte_carlo_lines(*lines, F, spec);
    RegionFeatures feats = collect_features(E);
    feats.spheres.push_back(*lines);
    (void)n;
    return integrate_lines(*lines, F, feats, spec);
  });
}

}  // namespace

Estimate gagliardo_power(const TestFunction& u, const SeminormParams& sp, const SeminormDomain& domain,
                         const QuadratureSpec& spec) {
  spec.validate();
  const int n = u.dim();
  if (auto* w = std::get_if<Window>(&domain)) require_same_dim(w->center, n, "seminorm window");
  if (u.is_constant()) return exact(0.0);
  const double p = sp.p, q = sp.alpha * sp.p;
  if (const Region* E = u.indicator_region()) return indicator_gagliardo(*E, q, domain, spec);

  const int depth = line_depth(n);
  std::optional<Window> lines;
  bool compact = false;
  if (auto* w = std::get_if<Window>(&domain)) {
    lines = *w;
  } else {
    lines = u.support();
    compact = lines.has_value();
    if (!compact && n > 1) throw DomainError("all-space seminorm in n > 1 needs a function with bounded support");
    if (!std::isfinite(u.sup_norm())) throw DomainError("all-space seminorm needs a bounded function");
  }

  if (!lines) {
    // n = 1, unbounded support.
    auto g = [&](double t) { return u(Vec{t}); };
    return line_full(g, p, q, kinks(u, Vec{0.0}, Vec{1.0}), mirror_points(u, Vec{0.0}, Vec{1.0}), spec, 0);
  }

  const Window W = *lines;
  LineFunctionK F = [&](const Vec& o, const Vec& d, std::span<double> v, std::span<double> e, SampleMeta& meta) {
    v[0] = e[0] = 0.0;
    auto ch = ball_chord(W, o, d);
    if (!ch) return;
    auto g = [&](double t) { return u(o + t * d); };
    auto kk = kinks(u, o, d);
    Estimate r = chord_double(g, ch->lo, ch->hi, p, q, kk, mirror_points(u, o, d), spec, depth);
    if (compact) r = r + chord_outside_compact(g, ch->lo, ch->hi, p, q, spec, depth);
    v[0] = r.value;
    e[0] = r.error_bound;
    meta.work = r.work;
    meta.status = r.status;
  };
  if (spec.method == Method::montecarlo) {
    LineFunction Fs = [&](const Vec& o, const Vec& d) {
      double v = 0, e = 0;
      SampleMeta m;
      F(o, d, std::span<double>(&v, 1), std::span<double>(&e, 1), m);
      return v;
    };
    return monte_carlo_lines(W, Fs, spec);
  }
  RegionFeatures feats;
  feats.spheres.push_back(W);
  if (auto s = u.support()) feats.spheres.push_back(*s);
  return integrate_lines_k(1, W, F, feats, spec).component(0);
}

Estimate gagliardo_seminorm(const TestFunction& u, const SeminormParams& sp, const SeminormDomain& domain,
                            const QuadratureSpec& spec) {
  Estimate e = gagliardo_power(u, sp, domain, spec);
  if (e.status != Status::ok && !std::isfinite(e.value)) return e;
  return power(e, 1.0 / sp.p);
}

Estimate boundary_gagliardo_power(const TestFunction& u, const SeminormParams& sp, const BoundaryPiece& boundary,
                                  const QuadratureSpec& spec) {
  spec.validate();
  const double p = sp.p, q = sp.alpha * sp.p;
  const double e = 1.0 / (p - q);
  return std::visit(
      overloaded{
          [&](const piece::Circle& c) -> Estimate {
            if (c.center.n != 2 || u.dim() != 2) throw DomainError("circle boundary lives in R^2");
            if (!(c.radius > 0.0)) throw DomainError("circle radius must be positive");
            if (u.is_constant()) return exact(0.0);
            const double R = c.radius;
            auto pt = [&](double a) { return c.center + R * Vec{std::cos(a), std::sin(a)}; };
            Options1D ot = options_from(spec, 0);
            return integrate_1d_nested(
                [&](double th) {
                  const double ut = u(pt(th));
                  Options1D od = options_from(spec, 1);
                  od.parallel = false;
                  return integrate_1d(
                      [&](double w) {
                        if (w <= 0.0) return 0.0;
                        double dl = kPi * std::pow(w, e);
                        double diff = std::abs(u(pt(th + dl)) - ut);
                        if (diff == 0.0) return 0.0;
                        double dist = 2.0 * R * std::sin(0.5 * dl);
                        return 2.0 * std::pow(diff, p) * std::pow(dist, -1.0 - q) * R * R * kPi * e *
                               std::pow(w, e - 1.0);
                      },
                      0.0, 1.0, od);
                },
                0.0, 2.0 * kPi, ot);
          },
          [&](const piece::Segment& sg) -> Estimate {
            if (sg.a.n != 2 || u.dim() != 2) throw DomainError("segment boundary lives in R^2");
            double L = norm(sg.b - sg.a);
            if (!(L > 0.0)) throw DomainError("segment must have positive length");
            if (u.is_constant()) return exact(0.0);
            Vec d = (1.0 / L) * (sg.b - sg.a);
            auto g = [&](double t) { return u(sg.a + t * d); };
            return chord_double(g, 0.0, L, p, q, kinks(u, sg.a, d), mirror_points(u, sg.a, d), spec, 0);
          },
          [&](const piece::Sphere& sph) -> Estimate {
            if (sph.center.n != 3 || u.dim() != 3) throw DomainError("sphere boundary lives in R^3");
            if (!(sph.radius > 0.0)) throw DomainError("sphere radius must be positive");
            if (u.is_constant()) return exact(0.0);
            const double R = sph.radius;
            Estimate total = integrate_sphere(
                3,
                [&](const Vec& x) {
                  const double ux = u(sph.center + R * x);
                  auto b = orthonormal_complement(x);
                  Options1D ow = options_from(spec, 2);
                  ow.parallel = false;
                  return integrate_1d_nested(
                      [&](double w) {
                        if (w <= 0.0) return exact(0.0);
                        double psi = kPi * std::pow(w, e);
                        double jac = kPi * e * std::pow(w, e - 1.0);
                        double dist = 2.0 * R * std::sin(0.5 * psi);
                        double kern = std::pow(dist, -2.0 - q) * R * R * std::sin(psi) * jac;
                        Options1D ob = options_from(spec, 3);
                        ob.parallel = false;
                        return integrate_1d(
                            [&](double beta) {
                              Vec y = std::cos(psi) * x + std::sin(psi) * (std::cos(beta) * b[0] + std::sin(beta) * b[1]);
                              double diff = std::abs(u(sph.center + R * y) - ux);
                              if (diff == 0.0) return 0.0;
                              return std::pow(diff, p) * kern;
                            },
                            0.0, 2.0 * kPi, ob);
                      },
                      0.0, 1.0, ow);
                },
                spec);
            return (R * R) * total;
          },
      },
      boundary);
}

Estimate boundary_gagliardo(const TestFunction& u, const SeminormParams& sp, const BoundaryPiece& boundary,
                            const QuadratureSpec& spec) {
  Estimate e = boundary_gagliardo_power(u, sp, boundary, spec);
  if (!std::isfinite(e.value)) return e;
  return power(e, 1.0 / sp.p);
}

// ---------------------------------------------------------------- interpolation

Estimate interpolation_lhs(const TestFunction& u, double R, const FractionalParams& params, const QuadratureSpec& spec,
                           std::optional<Vec> center) {
  spec.validate();
  const int n = params.n;
  if (u.dim() != n) throw DomainError("interpolation_lhs: function dimension does not match params.n");
  if (!(R > 0.0)) throw DomainError("interpolation_lhs: R must be positive");
  Vec c = center ? *center : Vec::zero(n);
  require_same_dim(c, n, "interpolation center");
  const Window W(c, R);
  if (u.is_constant()) return exact(0.0);
  if (const Region* E = u.indicator_region()) return 2.0 * per_s(*E, W, params, spec, PerimeterForm::q_form);
  if (!std::isfinite(u.sup_norm())) throw DomainError("interpolation_lhs needs a bounded function");
  const double s = params.s;
  const int depth = line_depth(n);
  auto supp = u.support();

  LineFunctionK F = [&](const Vec& o, const Vec& d, std::span<double> v, std::span<double> e, SampleMeta& meta) {
    v[0] = e[0] = 0.0;
    auto ch = ball_chord(W, o, d);
    if (!ch) return;
    const double a = ch->lo, b = ch->hi;
    auto g = [&](double t) { return u(o + t * d); };
    auto kk = kinks(u, o, d);
    auto mm = mirror_points(u, o, d);
    Estimate inside = chord_double(g, a, b, 1.0, s, kk, mm, spec, depth);
    // Support of g on this line, if known: beyond it g = 0 and the remaining tail is closed form.
    double s_lo = -kInf, s_hi = kInf;
    if (supp) {
      auto sc = ball_chord(*supp, o, d);
      if (!sc) {
        s_lo = s_hi = 0.5 * (a + b);
      } else {
        s_lo = sc->lo;
        s_hi = sc->hi;
      }
    }
    Options1D ot = options_from(spec, depth);
    ot.all_singular = true;
    ot.parallel = false;
    for (double k : kk)
      if (k > a && k < b) ot.breakpoints.push_back(k);
    for (double c : mm)
      if (c > a && c < b) ot.breakpoints.push_back(c);
    Estimate outside = integrate_1d_nested(
        [&](double t) {
          const double gt = g(t);
          Estimate acc = exact(0.0);
          acc.work = 0;
          // Right: tau in (b, inf); numerically on (b, max(b, s_hi)), closed form beyond.
          for (int side = 0; side < 2; ++side) {
            double edge = side == 0 ? b : a;
            double far = side == 0 ? std::max(b, s_hi) : std::min(a, s_lo);
            double dist0 = std::abs(t - edge);
            if (!(dist0 > 0.0)) continue;
            Options1D oi = options_from(spec, depth + 1);
            oi.parallel = false;
            oi.all_singular = true;
            for (double k : kk)
              if ((side == 0 && k > b && k < far) || (side == 1 && k < a && k > far)) oi.breakpoints.push_back(k);
            for (double c : mm) {
              double k = 2 * c - t;
              if ((side == 0 && k > b && k < far) || (side == 1 && k < a && k > far)) oi.breakpoints.push_back(k);
            }
            oi.scale = std::max(1.0, R);
            auto f = [&](double tau) {
              double diff = std::abs(g(tau) - gt);
              if (diff == 0.0) return 0.0;
              return diff * std::pow(std::abs(tau - t), -1.0 - s);
            };
            if (std::isfinite(far)) {
              if (far != edge) acc = acc + integrate_1d(f, std::min(edge, far), std::max(edge, far), oi);
              acc = acc + exact(std::abs(gt) * std::pow(std::abs(far - t), -s) / s);
            } else {
              acc = acc + (side == 0 ? integrate_1d(f, edge, kInf, oi) : integrate_1d(f, -kInf, edge, oi));
            }
          }
          return 2.0 * acc;
        },
        a, b, ot);
    Estimate r = inside + outside;
    v[0] = r.value;
    e[0] = r.error_bound;
    meta.work = r.work;
    meta.status = r.status;
  };
  if (spec.method == Method::montecarlo) {
    LineFunction Fs = [&](const Vec& o, const Vec& d) {
      double v = 0, e = 0;
      SampleMeta m;
      F(o, d, std::span<double>(&v, 1), std::span<double>(&e, 1), m);
      return v;
    };
    return monte_carlo_lines(W, Fs, spec);
  }
  RegionFeatures feats;
  feats.spheres.push_back(W);
  if (supp) feats.spheres.push_back(*supp);
  return integrate_lines_k(1, W, F, feats, spec).component(0);
}

Estimate total_variation(const TestFunction& u, const Window& ball, const QuadratureSpec& spec) {
  require_same_dim(ball.center, u.dim(), "total variation ball");
  if (u.is_constant()) return exact(0.0);
  if (const Region* E = u.indicator_region()) return exact(classical_perimeter(*E, ball));
  if (!u.gradient(ball.center)) throw DomainError("total variation needs an indicator or a differentiable function");
  Integrand f{[&](const Vec& x) {
                auto g = u.gradient(x);
                return g ? norm(*g) : 0.0;
              },
              std::nullopt};
  return integrate(f, ball, spec);
}

bool in_q_set(const Vec& x, const Vec& y, double R) { return norm(x) < R || norm(y) < R; }

}  // namespace fracsurf
