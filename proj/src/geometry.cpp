#include "fracsurf/geometry.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <functional>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracsurf/errors.hpp"
#include "fracsurf/specialfn.hpp"

namespace fracsurf {

namespace {

constexpr double kTie = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_unit(const Vec& v, const char* what) {
  if (std::abs(norm(v) - 1.0) > 1e-14 * 4) throw DomainError(std::string(what) + " must have unit length");
}

void check_dim(int n) {
  if (n < 1 || n > 3) throw DomainError("region dimension must be 1, 2 or 3, got " + std::to_string(n));
}

// Intervals where prod_k (alpha_k + beta_k t) > 0.
IntervalSet positive_product(const double* alpha, const double* beta, int count) {
  double roots[4];
  int nr = 0;
  for (int k = 0; k < count; ++k)
    if (beta[k] != 0.0) roots[nr++] = -alpha[k] / beta[k];
  std::sort(roots, roots + nr);
  auto sign_at = [&](double t, int dir) {
    // dir = -1/+1 means t -> -inf/+inf when t is infinite.
    double prod = 1.0;
    for (int k = 0; k < count; ++k) {
      double v;
      if (std::isinf(t))
        v = beta[k] != 0.0 ? (beta[k] > 0 ? dir : -dir) : alpha[k];
      else
        v = alpha[k] + beta[k] * t;
      prod *= v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
    }
    return prod > 0;
  };
  IntervalSet out;
  double prev = -kInf;
  for (int i = 0; i <= nr; ++i) {
    double next = i < nr ? roots[i] : kInf;
    if (next > prev) {
      bool pos;
      if (std::isinf(prev) && std::isinf(next))
        pos = sign_at(0.0, 0);
      else if (std::isinf(prev))
        pos = sign_at(-kInf, -1);
      else if (std::isinf(next))
        pos = sign_at(kInf, 1);
      else
        pos = sign_at(0.5 * (prev + next), 0);
      if (pos) {
        if (!out.empty() && out.back().hi >= prev)
          out.back().hi = next;
        else
          out.push_back({prev, next});
      }
    }
    prev = next;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- intervals

IntervalSet interval_union(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet all;
  all.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all),
             [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  IntervalSet out;
  for (const auto& iv : all) {
    if (!out.empty() && iv.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

IntervalSet interval_intersection(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet out;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].lo, b[j].lo);
    double hi = std::min(a[i].hi, b[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi)
      ++i;
    else
      ++j;
  }
  return out;
}

IntervalSet interval_complement(const IntervalSet& a) {
  IntervalSet out;
  double prev = -kInf;
  for (const auto& iv : a) {
    if (iv.lo > prev) out.push_back({prev, iv.lo});
    prev = iv.hi;
  }
  if (prev < kInf) out.push_back({prev, kInf});
  return out;
}

IntervalSet interval_difference(const IntervalSet& a, const IntervalSet& b) {
  return interval_intersection(a, interval_complement(b));
}

IntervalSet interval_shift(const IntervalSet& a, double by) {
  IntervalSet out = a;
  for (auto& iv : out) {
    iv.lo += by;
    iv.hi += by;
  }
  return out;
}

double interval_length(const IntervalSet& a) {
  double sum = 0.0;
  for (const auto& iv : a) sum += iv.hi - iv.lo;
  return sum;
}

bool interval_contains(const IntervalSet& a, double t) {
  for (const auto& iv : a)
    if (iv.lo < t && t < iv.hi) return true;
  return false;
}

// ---------------------------------------------------------------- regions

Window::Window(Vec c, double r) : center(c), radius(r) {
  if (!(r > 0.0) || std::isinf(r)) throw DomainError("window radius must be positive and finite");
}

Region Region::half_space(Vec normal, double offset) {
  check_dim(normal.n);
  check_unit(normal, "half-space normal");
  return Region(normal.n, shape::HalfSpace{normal, offset});
}

Region Region::ball(Vec center, double radius) {
  check_dim(center.n);
  if (!(radius > 0.0) || std::isinf(radius)) throw DomainError("ball radius must be positive and finite");
  return Region(center.n, shape::Ball{center, radius});
}

Region Region::slab(Vec direction, double lower, double upper) {
  check_dim(direction.n);
  check_unit(direction, "slab direction");
  if (!(lower < upper)) throw DomainError("slab requires lower < upper");
  return Region(direction.n, shape::Slab{direction, lower, upper});
}

Region Region::cross_cone_2d(Vec apex, double rotation) {
  if (apex.n != 2) throw DomainError("cross cone is defined only for n = 2");
  Vec a1{std::cos(rotation), std::sin(rotation)};
  Vec a2{-std::sin(rotation), std::cos(rotation)};
  return Region(2, shape::CrossCone{apex, a1, a2});
}

Region Region::empty(int dim) {
  check_dim(dim);
  return Region(dim, shape::Empty{});
}

Region Region::complement() const { return Region(dim_, shape::Complement{std::make_shared<const Region>(*this)}); }

Region set_union(const Region& a, const Region& b) {
  if (a.dim() != b.dim()) throw DomainError("union of regions with different dimensions");
  return Region(a.dim(), shape::Union{std::make_shared<const Region>(a), std::make_shared<const Region>(b)});
}

Region set_intersection(const Region& a, const Region& b) {
  if (a.dim() != b.dim()) throw DomainError("intersection of regions with different dimensions");
  return Region(a.dim(), shape::Intersection{std::make_shared<const Region>(a), std::make_shared<const Region>(b)});
}

bool Region::is_primitive() const {
  return !std::holds_alternative<shape::Union>(*shape_) && !std::holds_alternative<shape::Intersection>(*shape_) &&
         !std::holds_alternative<shape::Complement>(*shape_);
}

bool Region::contains(const Vec& p) const {
  require_same_dim(p, dim_, "membership query");
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          return dot(p, s.normal) - s.offset > kTie;
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          return s.radius - norm(p - s.center) > kTie;
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          double v = dot(p, s.direction);
          return std::min(v - s.lower, s.upper - v) > kTie;
        } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
          Vec d = p - s.apex;
          return dot(d, s.axis1) * dot(d, s.axis2) > kTie;
        } else if constexpr (std::is_same_v<T, shape::Empty>) {
          return false;
        } else if constexpr (std::is_same_v<T, shape::Complement>) {
          return !s.child->contains(p);
        } else if constexpr (std::is_same_v<T, shape::Union>) {
          return s.left->contains(p) || s.right->contains(p);
        } else {
          return s.left->contains(p) && s.right->contains(p);
        }
      },
      *shape_);
}

IntervalSet Region::line_intervals(const Vec& origin, const Vec& dir, double pin) const {
  return std::visit(
      [&](const auto& s) -> IntervalSet {
        using T = std::decay_t<decltype(s)>;
        IntervalSet out;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          double k = dot(dir, s.normal);
          double v0 = dot(origin, s.normal) - s.offset;
          if (std::abs(v0) <= pin) v0 = 0.0;
          if (k == 0.0) {
            if (v0 > 0.0) out.push_back({-kInf, kInf});
          } else {
            double t = -v0 / k;
            out.push_back(k > 0 ? Interval{t, kInf} : Interval{-kInf, t});
          }
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          Vec w = origin - s.center;
          double A = norm2(dir);
          double B = dot(dir, w);
          double C = norm2(w) - s.radius * s.radius;
          if (std::abs(C) <= pin * std::max(1.0, s.radius * s.radius)) C = 0.0;
          double disc = B * B - A * C;
          if (disc > 0.0) {
            double sq = std::sqrt(disc);
            double q = -(B + std::copysign(sq, B));
            double t1 = q / A, t2 = C / q;
            if (t1 > t2) std::swap(t1, t2);
            if (t1 < t2) out.push_back({t1, t2});
          }
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          double k = dot(dir, s.direction);
          double g = dot(origin, s.direction);
          double dl = s.lower - g, du = s.upper - g;
          if (std::abs(dl) <= pin) dl = 0.0;
          if (std::abs(du) <= pin) du = 0.0;
          if (k == 0.0) {
            if (dl < 0.0 && du > 0.0) out.push_back({-kInf, kInf});
          } else {
            double ta = dl / k, tb = du / k;
            if (ta > tb) std::swap(ta, tb);
            out.push_back({ta, tb});
          }
        } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
          Vec w = origin - s.apex;
          double alpha[2] = {dot(w, s.axis1), dot(w, s.axis2)};
          for (double& a : alpha)
            if (std::abs(a) <= pin) a = 0.0;
          double beta[2] = {dot(dir, s.axis1), dot(dir, s.axis2)};
          out = positive_product(alpha, beta, 2);
        } else if constexpr (std::is_same_v<T, shape::Empty>) {
        } else if constexpr (std::is_same_v<T, shape::Complement>) {
          out = interval_complement(s.child->line_intervals(origin, dir, pin));
        } else if constexpr (std::is_same_v<T, shape::Union>) {
          out = interval_union(s.left->line_intervals(origin, dir, pin), s.right->line_intervals(origin, dir, pin));
        } else {
          out = interval_intersection(s.left->line_intervals(origin, dir, pin),
                                      s.right->line_intervals(origin, dir, pin));
        }
        return out;
      },
      *shape_);
}

namespace {

Window enclosing(const Window& a, const Window& b) {
  Vec d = b.center - a.center;
  double dist = norm(d);
  if (dist + b.radius <= a.radius) return a;
  if (dist + a.radius <= b.radius) return b;
  double r = 0.5 * (dist + a.radius + b.radius);
  Vec c = a.center + ((r - a.radius) / dist) * d;
  return Window(c, r);
}

std::optional<Window> smaller(const std::optional<Window>& a, const std::optional<Window>& b) {
  if (!a) return b;
  if (!b) return a;
  return a->radius <= b->radius ? a : b;
}

}  // namespace

std::optional<Window> Region::bounding_ball() const {
  return std::visit(
      [&](const auto& s) -> std::optional<Window> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::Ball>) {
          return Window(s.center, s.radius);
        } else if constexpr (std::is_same_v<T, shape::Empty>) {
          return Window(Vec::zero(dim_), 1e-300);
        } else if constexpr (std::is_same_v<T, shape::Complement>) {
          return s.child->complement_bounding_ball();
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          if (dim_ != 1) return std::nullopt;
          return Window(0.5 * (s.lower + s.upper) * s.direction, 0.5 * (s.upper - s.lower));
        } else if constexpr (std::is_same_v<T, shape::Union>) {
          auto a = s.left->bounding_ball(), b = s.right->bounding_ball();
          if (!a || !b) return std::nullopt;
          return enclosing(*a, *b);
        } else if constexpr (std::is_same_v<T, shape::Intersection>) {
          return smaller(s.left->bounding_ball(), s.right->bounding_ball());
        } else {
          return std::nullopt;
        }
      },
      *shape_);
}

std::optional<Window> Region::complement_bounding_ball() const {
  return std::visit(
      [&](const auto& s) -> std::optional<Window> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::Complement>) {
          return s.child->bounding_ball();
        } else if constexpr (std::is_same_v<T, shape::Union>) {
          return smaller(s.left->complement_bounding_ball(), s.right->complement_bounding_ball());
        } else if constexpr (std::is_same_v<T, shape::Intersection>) {
          auto a = s.left->complement_bounding_ball(), b = s.right->complement_bounding_ball();
          if (!a || !b) return std::nullopt;
          return enclosing(*a, *b);
        } else {
          return std::nullopt;
        }
      },
      *shape_);
}

Region Region::transformed(double scale, const Vec& v) const {
  if (!(scale > 0.0)) throw DomainError("transform scale must be positive");
  require_same_dim(v, dim_, "transform translation");
  return std::visit(
      [&](const auto& s) -> Region {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          return Region(dim_, shape::HalfSpace{s.normal, scale * s.offset + dot(v, s.normal)});
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          return Region(dim_, shape::Ball{scale * s.center + v, scale * s.radius});
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          double shift = dot(v, s.direction);
          return Region(dim_, shape::Slab{s.direction, scale * s.lower + shift, scale * s.upper + shift});
        } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
          return Region(dim_, shape::CrossCone{scale * s.apex + v, s.axis1, s.axis2});
        } else if constexpr (std::is_same_v<T, shape::Empty>) {
          return *this;
        } else if constexpr (std::is_same_v<T, shape::Complement>) {
          return s.child->transformed(scale, v).complement();
        } else if constexpr (std::is_same_v<T, shape::Union>) {
          return set_union(s.left->transformed(scale, v), s.right->transformed(scale, v));
        } else {
          return set_intersection(s.left->transformed(scale, v), s.right->transformed(scale, v));
        }
      },
      *shape_);
}

Region Region::rotated(const std::array<Vec, kMaxDim>& rows) const {
  auto apply = [&](const Vec& p) {
    Vec out(dim_);
    for (int i = 0; i < dim_; ++i) out[i] = dot(rows[i], p);
    return out;
  };
  return std::visit(
      [&](const auto& s) -> Region {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          return Region(dim_, shape::HalfSpace{apply(s.normal), s.offset});
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          return Region(dim_, shape::Ball{apply(s.center), s.radius});
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          return Region(dim_, shape::Slab{apply(s.direction), s.lower, s.upper});
        } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
          return Region(dim_, shape::CrossCone{apply(s.apex), apply(s.axis1), apply(s.axis2)});
        } else if constexpr (std::is_same_v<T, shape::Empty>) {
          return *this;
        } else if constexpr (std::is_same_v<T, shape::Complement>) {
          return s.child->rotated(rows).complement();
        } else if constexpr (std::is_same_v<T, shape::Union>) {
          return set_union(s.left->rotated(rows), s.right->rotated(rows));
        } else {
          return set_intersection(s.left->rotated(rows), s.right->rotated(rows));
        }
      },
      *shape_);
}

std::string Region::describe() const {
  std::ostringstream os;
  auto vec = [&](const Vec& v) {
    os << "(";
    for (int i = 0; i < v.n; ++i) os << (i ? "," : "") << v[i];
    os << ")";
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          os << "halfspace[normal=";
          vec(s.normal);
          os << ",offset=" << s.offset << "]";
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          os << "ball[center=";
          vec(s.center);
          os << ",radius=" << s.radius << "]";
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          os << "slab[direction=";
          vec(s.direction);
          os << ",lower=" << s.lower << ",upper=" << s.upper << "]";
        } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
          os << "crosscone2d[apex=";
          vec(s.apex);
          os << "]";
        } else if constexpr (std::is_same_v<T, shape::Empty>) {
          os << "empty";
        } else if constexpr (std::is_same_v<T, shape::Complement>) {
          os << "complement(" << s.child->describe() << ")";
        } else if constexpr (std::is_same_v<T, shape::Union>) {
          os << "union(" << s.left->describe() << "," << s.right->describe() << ")";
        } else {
          os << "intersection(" << s.left->describe() << "," << s.right->describe() << ")";
        }
      },
      *shape_);
  return os.str();
}

int signed_indicator(const Region& region, const Vec& point) { return region.contains(point) ? -1 : 1; }

Region transform(const Region& region, double scale, const Vec& translate) {
  return region.transformed(scale, translate);
}

// ---------------------------------------------------------------- perimeter

namespace {

constexpr double kPi = std::numbers::pi;

double degenerate_tol(double scale) { return 1e-12 * std::max(1.0, scale); }

// Measure of the hyperplane piece {x.normal = offset} inside the window.
double plane_in_window(const Vec& normal, double offset, const Window& w) {
  int n = normal.n;
  double d = dot(w.center, normal) - offset;
  double R = w.radius;
  if (std::abs(R - std::abs(d)) <= degenerate_tol(R))
    throw DegenerateConfigurationError("hyperplane is tangent to the window sphere");
  if (std::abs(d) >= R) return 0.0;
  return unit_ball_volume(n - 1) * std::pow(R * R - d * d, 0.5 * (n - 1));
}

double sphere_in_window(const Vec& center, double r, const Window& w) {
  int n = center.n;
  double D = norm(w.center - center);
  double R = w.radius;
  double tol = degenerate_tol(std::max(R, r));
  if (std::abs(D - (R + r)) <= tol || std::abs(D - std::abs(R - r)) <= tol)
    throw DegenerateConfigurationError("sphere is tangent to the window sphere");
  if (n == 1) {
    int count = 0;
    for (double sgn : {-1.0, 1.0})
      if (std::abs(center[0] + sgn * r - w.center[0]) < R) ++count;
    return count;
  }
  double full = sphere_area(n) * std::pow(r, n - 1);
  if (D + r <= R) return full;
  if (D >= R + r || r >= D + R) return 0.0;
  double cphi = (r * r + D * D - R * R) / (2 * r * D);
  cphi = std::clamp(cphi, -1.0, 1.0);
  if (n == 2) return 2 * r * std::acos(cphi);
  return 2 * kPi * r * r * (1 - cphi);
}

double line_in_window(const Vec& point, const Vec& dir, const Window& w) {
  Vec rel = w.center - point;
  Vec perp = rel - dot(rel, dir) * dir;
  double d = norm(perp);
  double R = w.radius;
  if (std::abs(R - d) <= degenerate_tol(R)) throw DegenerateConfigurationError("boundary line is tangent to the window");
  if (d >= R) return 0.0;
  return 2 * std::sqrt(R * R - d * d);
}

double primitive_perimeter(const Region& r, const Window& w) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          return plane_in_window(s.normal, s.offset, w);
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          return sphere_in_window(s.center, s.radius, w);
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          return plane_in_window(s.direction, s.lower, w) + plane_in_window(s.direction, s.upper, w);
        } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
          return line_in_window(s.apex, s.axis1, w) + line_in_window(s.apex, s.axis2, w);
        } else if constexpr (std::is_same_v<T, shape::Empty>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, shape::Complement>) {
          return primitive_perimeter(*s.child, w);
        } else {
          throw DomainError("primitive_perimeter called on a composite");
        }
      },
      r.shape());
}

bool composite_free(const Region& r) {
  if (const auto* c = std::get_if<shape::Complement>(&r.shape())) return composite_free(*c->child);
  return r.is_primitive();
}

void collect_leaves(const Region& r, std::vector<const Region*>& out) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::Complement>) {
          collect_leaves(*s.child, out);
        } else if constexpr (std::is_same_v<T, shape::Union> || std::is_same_v<T, shape::Intersection>) {
          collect_leaves(*s.left, out);
          collect_leaves(*s.right, out);
        } else {
          out.push_back(&r);
        }
      },
      r.shape());
}

// A smooth boundary piece of a leaf: point(u) and normal(u) for u in a parameter domain.
struct CurvePiece {
  double u0, u1;                       // parameter range
  double jac;                          // arc-length factor
  std::function<Vec(double)> point;    // n = 2
  std::function<Vec(double)> normal;
};

struct SurfacePiece {  // n = 3
  double u0, u1;
  std::function<std::pair<double, double>(double)> v_range;
  std::function<double(double, double)> jac;
  std::function<Vec(double, double)> point;
  std::function<Vec(double, double)> normal;
};

struct FlipTest {
  const Region& region;
  const Window& window;
  double eta;
  bool operator()(const Vec& q, const Vec& nrm) const {
    if (norm(q - window.center) >= window.radius) return false;
    return region.contains(q + eta * nrm) != region.contains(q - eta * nrm);
  }
};

// Measure of {u in [u0,u1] : pred(u)} by sampling and bisection of every transition.
template <class P>
double measure_1d(double u0, double u1, P pred, int samples) {
  double h = (u1 - u0) / samples;
  double total = 0.0;
  bool prev = pred(u0 + 0.5 * h);
  double start = prev ? u0 : 0.0;
  for (int i = 1; i < samples; ++i) {
    double u = u0 + (i + 0.5) * h;
    bool cur = pred(u);
    if (cur != prev) {
      double a = u - h, b = u;
      for (int it = 0; it < 60 && b - a > 1e-15 * std::max(1.0, std::abs(u)); ++it) {
        double m = 0.5 * (a + b);
        (pred(m) == prev ? a : b) = m;
      }
      double cross = 0.5 * (a + b);
      if (cur)
        start = cross;
      else
        total += cross - start;
      prev = cur;
    }
  }
  if (prev) total += u1 - start;
  return total;
}

std::vector<CurvePiece> curve_pieces(const Region& leaf, const Window& w) {
  std::vector<CurvePiece> out;
  auto add_line = [&](const Vec& p0, const Vec& dir, const Vec& nrm) {
    Vec rel = w.center - p0;
    double tc = dot(rel, dir);
    out.push_back({tc - w.radius, tc + w.radius, 1.0, [p0, dir](double t) { return p0 + t * dir; },
                   [nrm](double) { return nrm; }});
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          Vec dir{-s.normal[1], s.normal[0]};
          add_line(s.offset * s.normal, dir, s.normal);
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          Vec c = s.center;
          double r = s.radius;
          out.push_back({0.0, 2 * kPi, r, [c, r](double a) { return c + r * Vec{std::cos(a), std::sin(a)}; },
                         [](double a) { return Vec{std::cos(a), std::sin(a)}; }});
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          Vec dir{-s.direction[1], s.direction[0]};
          add_line(s.lower * s.direction, dir, s.direction);
          add_line(s.upper * s.direction, dir, s.direction);
        } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
          add_line(s.apex, s.axis1, s.axis2);
          add_line(s.apex, s.axis2, s.axis1);
        }
      },
      leaf.shape());
  return out;
}

std::vector<SurfacePiece> surface_pieces(const Region& leaf, const Window& w) {
  std::vector<SurfacePiece> out;
  auto add_plane = [&](const Vec& nrm, double offset) {
    double d = dot(w.center, nrm) - offset;
    if (std::abs(d) >= w.radius) return;
    double rho = std::sqrt(w.radius * w.radius - d * d);
    Vec c = w.center - d * nrm;
    auto basis = orthonormal_complement(nrm);
    Vec e1 = basis[0], e2 = basis[1];
    out.push_back({-rho, rho,
                   [rho](double u) {
                     double h = std::sqrt(std::max(0.0, rho * rho - u * u));
                     return std::make_pair(-h, h);
                   },
                   [](double, double) { return 1.0; }, [c, e1, e2](double u, double v) { return c + u * e1 + v * e2; },
                   [nrm](double, double) { return nrm; }});
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          add_plane(s.normal, s.offset);
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          Vec c = s.center;
          double r = s.radius;
          auto dirf = [](double z, double g) {
            double sz = std::sqrt(std::max(0.0, 1 - z * z));
            return Vec{sz * std::cos(g), sz * std::sin(g), z};
          };
          out.push_back({-1.0, 1.0, [](double) { return std::make_pair(0.0, 2 * kPi); },
                         [r](double, double) { return r * r; },
                         [c, r, dirf](double z, double g) { return c + r * dirf(z, g); },
                         [dirf](double z, double g) { return dirf(z, g); }});
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          add_plane(s.direction, s.lower);
          add_plane(s.direction, s.upper);
        }
      },
      leaf.shape());
  return out;
}

double composite_perimeter(const Region& region, const Window& w) {
  std::vector<const Region*> leaves;
  collect_leaves(region, leaves);
  // Transversality of each leaf against the window (throws on tangency).
  for (const Region* leaf : leaves) primitive_perimeter(*leaf, w);
  FlipTest flip{region, w, 1e-9 * std::max(1.0, w.radius)};
  int n = region.dim();
  if (n == 1) {
    std::vector<double> pts;
    for (const Region* leaf : leaves) {
      auto ivs = leaf->line_intervals(Vec{0.0}, Vec{1.0});
      for (const auto& iv : ivs)
        for (double t : {iv.lo, iv.hi})
          if (std::isfinite(t)) pts.push_back(t);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              pts.end());
    double count = 0;
    for (double t : pts)
      if (flip(Vec{t}, Vec{1.0})) count += 1;
    return count;
  }
  double total = 0.0;
  if (n == 2) {
    for (const Region* leaf : leaves)
      for (const auto& piece : curve_pieces(*leaf, w)) {
        auto pred = [&](double u) { return flip(piece.point(u), piece.normal(u)); };
        total += piece.jac * measure_1d(piece.u0, piece.u1, pred, 4096);
      }
    return total;
  }
  for (const Region* leaf : leaves)
    for (const auto& piece : surface_pieces(*leaf, w)) {
      auto inner = [&](double u) {
        auto [v0, v1] = piece.v_range(u);
        if (!(v1 > v0)) return 0.0;
        auto pred = [&](double v) { return flip(piece.point(u, v), piece.normal(u, v)); };
        return piece.jac(u, 0.0) * measure_1d(v0, v1, pred, 1024);
      };
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(inner, piece.u0, piece.u1, 12, 1e-11);
    }
  return total;
}

}  // namespace

double classical_perimeter(const Region& region, const Window& window) {
  require_same_dim(window.center, region.dim(), "classical_perimeter window");
  if (composite_free(region)) return primitive_perimeter(region, window);
  return composite_perimeter(region, window);
}

// ---------------------------------------------------------------- probes

namespace {

std::optional<Vec> leaf_normal_at(const Region& leaf, const Vec& p, double tol) {
  return std::visit(
      [&](const auto& s) -> std::optional<Vec> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::HalfSpace>) {
          if (std::abs(dot(p, s.normal) - s.offset) < tol) return s.normal;
        } else if constexpr (std::is_same_v<T, shape::Ball>) {
          Vec d = p - s.center;
          if (std::abs(norm(d) - s.radius) < tol) return normalized(d);
        } else if constexpr (std::is_same_v<T, shape::Slab>) {
          double v = dot(p, s.direction);
          if (std::abs(v - s.lower) < tol || std::abs(v - s.upper) < tol) return s.direction;
        } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
          Vec d = p - s.apex;
          double f1 = dot(d, s.axis1), f2 = dot(d, s.axis2);
          if (std::abs(f1) < tol && std::abs(f2) < tol) return std::nullopt;
          if (std::abs(f2) < tol) return s.axis2;
          if (std::abs(f1) < tol) return s.axis1;
        }
        return std::nullopt;
      },
      leaf.shape());
}

BoundaryProbe orient(const Region& region, const Vec& p, const Vec& nrm) {
  double eta = 1e-9 * std::max(1.0, norm(p));
  bool plus = region.contains(p + eta * nrm), minus = region.contains(p - eta * nrm);
  if (plus == minus) throw DomainError("selected point is not on the boundary");
  return BoundaryProbe{p, plus ? -nrm : nrm, true};
}

const shape::CrossCone* as_cone(const Region& r) { return std::get_if<shape::CrossCone>(&r.shape()); }

}  // namespace

BoundaryProbe boundary_probe(const Region& region, const BoundarySelector& sel) {
  const int n = region.dim();
  const auto& s = region.shape();
  auto need = [&](size_t k) {
    if (sel.values.size() != k)
      throw DomainError("selector '" + sel.name + "' expects " + std::to_string(k) + " parameter(s)");
  };
  if (const auto* c = std::get_if<shape::Complement>(&s); c && sel.name != "point") {
    BoundaryProbe p = boundary_probe(*c->child, sel);
    p.normal = -1.0 * p.normal;
    return p;
  }
  if (sel.name == "vertex") {
    const auto* cone = as_cone(region);
    if (!cone) throw DomainError("selector 'vertex' requires a cross cone");
    return BoundaryProbe{cone->apex, Vec::zero(2), false};
  }
  if (sel.name == "axis1" || sel.name == "axis2") {
    const auto* cone = as_cone(region);
    if (!cone) throw DomainError("selector '" + sel.name + "' requires a cross cone");
    need(1);
    double t = sel.values[0];
    if (t == 0.0) throw DomainError("axis parameter 0 is the vertex; use selector 'vertex'");
    bool first = sel.name == "axis1";
    Vec p = cone->apex + t * (first ? cone->axis1 : cone->axis2);
    return orient(region, p, first ? cone->axis2 : cone->axis1);
  }
  if (sel.name == "origin" || sel.name == "offset") {
    if (const auto* hs = std::get_if<shape::HalfSpace>(&s)) {
      Vec p = hs->offset * hs->normal;
      if (sel.name == "offset") {
        need(static_cast<size_t>(n - 1));
        auto basis = orthonormal_complement(hs->normal);
        for (int i = 0; i < n - 1; ++i) p += sel.values[i] * basis[i];
      }
      return BoundaryProbe{p, -hs->normal, true};
    }
    if (const auto* sl = std::get_if<shape::Slab>(&s)) {
      if (sel.name != "origin") throw DomainError("selector 'offset' is not supported for slabs");
      return BoundaryProbe{sl->lower * sl->direction, -sl->direction, true};
    }
    throw DomainError("selector '" + sel.name + "' requires a half-space or slab");
  }
  if (sel.name == "upper") {
    const auto* sl = std::get_if<shape::Slab>(&s);
    if (!sl) throw DomainError("selector 'upper' requires a slab");
    return BoundaryProbe{sl->upper * sl->direction, sl->direction, true};
  }
  if (sel.name == "pole" || sel.name == "angle") {
    const auto* b = std::get_if<shape::Ball>(&s);
    if (!b) throw DomainError("selector '" + sel.name + "' requires a ball");
    Vec dir = Vec::unit(n, n - 1);
    if (sel.name == "angle") {
      if (n != 2) throw DomainError("selector 'angle' requires n = 2");
      need(1);
      dir = Vec{std::cos(sel.values[0]), std::sin(sel.values[0])};
    }
    return BoundaryProbe{b->center + b->radius * dir, dir, true};
  }
  if (sel.name == "point") {
    need(static_cast<size_t>(n));
    Vec p(n);
    for (int i = 0; i < n; ++i) p[i] = sel.values[i];
    std::vector<const Region*> leaves;
    collect_leaves(region, leaves);
    double tol = 1e-12 * std::max(1.0, norm(p));
    for (const Region* leaf : leaves) {
      if (const auto* cone = as_cone(*leaf)) {
        if (norm(p - cone->apex) < tol) return BoundaryProbe{p, Vec::zero(2), false};
      }
      if (auto nrm = leaf_normal_at(*leaf, p, tol)) {
        try {
          return orient(region, p, *nrm);
        } catch (const DomainError&) {
        }
      }
    }
    throw DomainError("selected point is not on the boundary");
  }
  throw DomainError("unknown boundary selector '" + sel.name + "'");
}

RegionFeatures collect_features(const Region& region) {
  RegionFeatures f;
  std::vector<const Region*> leaves;
  collect_leaves(region, leaves);
  for (const Region* leaf : leaves) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, shape::HalfSpace>) {
            f.plane_normals.push_back(s.normal);
            f.planes.emplace_back(s.normal, s.offset);
          } else if constexpr (std::is_same_v<T, shape::Ball>) {
            f.spheres.emplace_back(s.center, s.radius);
          } else if constexpr (std::is_same_v<T, shape::Slab>) {
            f.plane_normals.push_back(s.direction);
            f.planes.emplace_back(s.direction, s.lower);
            f.planes.emplace_back(s.direction, s.upper);
          } else if constexpr (std::is_same_v<T, shape::CrossCone>) {
            f.apexes.push_back(s.apex);
            f.axes.push_back(s.axis1);
            f.axes.push_back(s.axis2);
          }
        },
        leaf->shape());
  }
  return f;
}

void merge_features(RegionFeatures& into, const RegionFeatures& from) {
  into.spheres.insert(into.spheres.end(), from.spheres.begin(), from.spheres.end());
  into.plane_normals.insert(into.plane_normals.end(), from.plane_normals.begin(), from.plane_normals.end());
  into.planes.insert(into.planes.end(), from.planes.begin(), from.planes.end());
  into.apexes.insert(into.apexes.end(), from.apexes.begin(), from.apexes.end());
  into.axes.insert(into.axes.end(), from.axes.begin(), from.axes.end());
}

}  // namespace fracsurf
