#include "fracsurf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "fracsurf/errors.hpp"
#include "fracsurf/lines.hpp"
#include "fracsurf/parallel.hpp"

namespace fracsurf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxK = 8;

// Kronrod 21 / Gauss 10 abscissae and weights.
constexpr double xgk[11] = {0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                            0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                            0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                            0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                            0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
                            0.000000000000000000000000000000000};
constexpr double wgk[11] = {0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
                            0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
                            0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                            0.123491976262065851077600525452287, 0.134709217311473325928054001771707,
                            0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                            0.149445554002916905664936468389821};
constexpr double wg[5] = {0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
                          0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
                          0.295524224714752870173892994651338};

enum class MapKind { identity, tanh_sinh, exp_up, exp_down, sinh_sinh };

struct Segment {
  MapKind kind;
  double a, b, L;  // x-range (a may be -inf, b may be +inf); L is the map length
  double t0, t1;
};

inline bool map_point(const Segment& s, double t, double& x, double& w) {
  switch (s.kind) {
    case MapKind::identity:
      x = t;
      w = 1.0;
      break;
    case MapKind::tanh_sinh: {
      double z = kPi * std::sinh(t);
      double e = std::exp(-std::abs(z));
      double sig = e / (1.0 + e);
      x = z < 0 ? s.a + s.L * sig : s.b - s.L * sig;
      w = s.L * e / ((1.0 + e) * (1.0 + e)) * kPi * std::cosh(t);
      break;
    }
    case MapKind::exp_up: {
      double ez = std::exp(0.5 * kPi * std::sinh(t));
      x = s.a + s.L * ez;
      w = s.L * ez * 0.5 * kPi * std::cosh(t);
      break;
    }
    case MapKind::exp_down: {
      double ez = std::exp(0.5 * kPi * std::sinh(t));
      x = s.b - s.L * ez;
      w = s.L * ez * 0.5 * kPi * std::cosh(t);
      break;
    }
    case MapKind::sinh_sinh: {
      double z = 0.5 * kPi * std::sinh(t);
      x = s.a + s.L * std::sinh(z);
      w = s.L * std::cosh(z) * 0.5 * kPi * std::cosh(t);
      break;
    }
  }
  if (s.kind == MapKind::sinh_sinh) return std::isfinite(x) && std::isfinite(w) && w > 0;
  return x > s.a && x < s.b && std::isfinite(x) && std::isfinite(w) && w > 0;
}

struct Panel {
  int seg;
  double ta, tb;
  double val[kMaxK], err[kMaxK], prop[kMaxK];
  bool lo_live, hi_live;  // outermost live nodes on each side
  double lo_x, hi_x, lo_f[kMaxK], hi_f[kMaxK];
  double priority;
  bool splittable;
};

struct NodeOut {
  double v[kMaxK];
  double e[kMaxK];
  SampleMeta meta;
  double x, w;
  bool live;
};

std::string format_point(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

class Engine {
 public:
  Engine(int K, const MultiIntegrand& f, const Options1D& opt) : K_(K), f_(f), opt_(opt) {}

  void evaluate(std::vector<Panel>& panels, const std::vector<Segment>& segs) {
    const size_t count = panels.size() * 21;
    std::vector<NodeOut> out(count);
    auto body = [&](size_t idx) {
      const Panel& p = panels[idx / 21];
      int j = static_cast<int>(idx % 21);
      const Segment& s = segs[p.seg];
      double c = 0.5 * (p.ta + p.tb), h = 0.5 * (p.tb - p.ta);
      double t = j == 20 ? c : (j < 10 ? c - h * xgk[j] : c + h * xgk[j - 10]);
      NodeOut& o = out[idx];
      std::fill(o.v, o.v + kMaxK, 0.0);
      std::fill(o.e, o.e + kMaxK, 0.0);
      o.meta = SampleMeta{0, Status::ok};
      double x = 0.0, w = 0.0;
      o.live = map_point(s, t, x, w);
      o.x = x;
      o.w = w;
      if (!o.live) return;
      o.meta.work = 1;
      f_(x, std::span<double>(o.v, K_), std::span<double>(o.e, K_), o.meta);
      for (int k = 0; k < K_; ++k) {
        if (!std::isfinite(o.v[k]))
          throw EvaluationError("integrand returned a non-finite value at x = " + format_point(x));
        o.v[k] *= w;
        o.e[k] = std::abs(o.e[k]) * w;
        if (!std::isfinite(o.v[k])) o.v[k] = 0.0;
        if (!std::isfinite(o.e[k])) o.e[k] = 0.0;
      }
    };
    if (opt_.parallel)
      parallel_for(count, body);
    else
      for (size_t i = 0; i < count; ++i) body(i);

    for (size_t pi = 0; pi < panels.size(); ++pi) {
      Panel& p = panels[pi];
      const NodeOut* nd = &out[pi * 21];
      double h = 0.5 * (p.tb - p.ta);
      for (int i = 0; i < 21; ++i) {
        work_ += nd[i].meta.work;
        status_ = worse(status_, nd[i].meta.status);
      }
      double prio = 0.0;
      for (int k = 0; k < K_; ++k) {
        auto f1 = [&](int j) { return nd[j].v[k]; };       // c - h x_j
        auto f2 = [&](int j) { return nd[10 + j].v[k]; };  // c + h x_j
        double fc = nd[20].v[k];
        double resk = wgk[10] * fc, resg = 0.0, resabs = std::abs(resk);
        for (int j = 0; j < 10; ++j) {
          double s2 = f1(j) + f2(j);
          resk += wgk[j] * s2;
          resabs += wgk[j] * (std::abs(f1(j)) + std::abs(f2(j)));
          if (j % 2 == 1) resg += wg[j / 2] * s2;
        }
        double reskh = 0.5 * resk;
        double resasc = wgk[10] * std::abs(fc - reskh);
        for (int j = 0; j < 10; ++j) resasc += wgk[j] * (std::abs(f1(j) - reskh) + std::abs(f2(j) - reskh));
        double result = resk * h;
        resabs *= std::abs(h);
        resasc *= std::abs(h);
        double abserr = std::abs((resk - resg) * h);
        if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
        if (resabs > std::numeric_limits<double>::min() / (50 * kEps)) abserr = std::max(50 * kEps * resabs, abserr);
        double prop = wgk[10] * nd[20].e[k];
        for (int j = 0; j < 10; ++j) prop += wgk[j] * (nd[j].e[k] + nd[10 + j].e[k]);
        p.val[k] = result;
        p.err[k] = abserr;
        p.prop[k] = prop * std::abs(h);
        prio += abserr;
      }
      record_extremes(p, nd);
      p.priority = prio;
      double mid = 0.5 * (p.ta + p.tb);
      p.splittable = (p.tb - p.ta) > 64 * kEps * std::max(1.0, std::abs(mid));
    }
  }

  std::uint64_t work() const { return work_; }
  Status status() const { return status_; }

 private:
  // Records the live nodes with smallest and largest t, with unweighted values.
  void record_extremes(Panel& p, const NodeOut* nd) const {
    static constexpr int up[21] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 20, 19, 18, 17, 16, 15, 14, 13, 12, 11, 10};
    p.lo_live = p.hi_live = false;
    for (int i = 0; i < 21 && !p.lo_live; ++i) {
      const NodeOut& o = nd[up[i]];
      if (!o.live) continue;
      p.lo_live = true;
      p.lo_x = o.x;
      for (int k = 0; k < K_; ++k) p.lo_f[k] = std::abs(o.v[k] / o.w);
    }
    for (int i = 20; i >= 0 && !p.hi_live; --i) {
      const NodeOut& o = nd[up[i]];
      if (!o.live) continue;
      p.hi_live = true;
      p.hi_x = o.x;
      for (int k = 0; k < K_; ++k) p.hi_f[k] = std::abs(o.v[k] / o.w);
    }
  }

  int K_;
  const MultiIntegrand& f_;
  const Options1D& opt_;
  std::uint64_t work_ = 0;
  Status status_ = Status::ok;
};

std::vector<Segment> build_segments(double a, double b, const Options1D& opt) {
  std::vector<double> pts{a, b};
  for (double x : opt.breakpoints)
    if (x > a && x < b) pts.push_back(x);
  for (double x : opt.singular)
    if (x > a && x < b) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto is_singular = [&](double x) {
    if (opt.all_singular) return true;
    return std::find(opt.singular.begin(), opt.singular.end(), x) != opt.singular.end();
  };
  std::vector<Segment> segs;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    Segment s{};
    s.a = lo;
    s.b = hi;
    if (std::isinf(lo) && std::isinf(hi)) {
      s.kind = MapKind::sinh_sinh;
      s.a = 0.0;
      s.L = opt.scale;
      s.t0 = -5.0;
      s.t1 = 5.0;
    } else if (std::isinf(hi)) {
      s.kind = MapKind::exp_up;
      s.L = opt.scale;
      s.t0 = -6.0;
      s.t1 = 6.0;
    } else if (std::isinf(lo)) {
      s.kind = MapKind::exp_down;
      s.L = opt.scale;
      s.t0 = -6.0;
      s.t1 = 6.0;
    } else if (is_singular(lo) || is_singular(hi)) {
      s.kind = MapKind::tanh_sinh;
      s.L = hi - lo;
      s.t0 = is_singular(lo) ? -6.0 : -3.2;
      s.t1 = is_singular(hi) ? 6.0 : 3.2;
    } else {
      s.kind = MapKind::identity;
      s.t0 = lo;
      s.t1 = hi;
    }
    if (s.kind != MapKind::identity || hi > lo) segs.push_back(s);
  }
  return segs;
}

}  // namespace

// ---------------------------------------------------------------- basics

const char* to_string(Method m) { return m == Method::adaptive ? "adaptive" : "montecarlo"; }
const char* to_string(BoundKind k) {
  return k == BoundKind::deterministic_bound ? "deterministic_bound" : "statistical_3sigma";
}
const char* to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::budget_exhausted: return "budget_exhausted";
    case Status::divergent: return "divergent";
    case Status::non_convergent: return "non_convergent";
  }
  return "unknown";
}

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
  if (!(abs_tol > 0.0)) throw DomainError("abs_tol must be positive");
  if (max_subdivisions < 1) throw DomainError("max_subdivisions must be positive");
  if (!(truncation_radius > 0.0)) throw DomainError("truncation_radius must be positive");
  if (!(pv_epsilon > 0.0)) throw DomainError("pv_epsilon must be positive");
  if (sample_budget < 1) throw DomainError("sample_budget must be positive");
}

Status worse(Status a, Status b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

Estimate flagged_estimate(Status status) {
  Estimate e;
  e.value = std::numeric_limits<double>::quiet_NaN();
  e.error_bound = kInf;
  e.status = status;
  return e;
}

Estimate operator+(const Estimate& a, const Estimate& b) {
  Estimate r;
  r.value = a.value + b.value;
  r.error_bound = a.error_bound + b.error_bound;
  r.kind = (a.kind == BoundKind::statistical_3sigma || b.kind == BoundKind::statistical_3sigma)
               ? BoundKind::statistical_3sigma
               : BoundKind::deterministic_bound;
  r.work = a.work + b.work;
  r.status = worse(a.status, b.status);
  return r;
}

Estimate operator-(const Estimate& a, const Estimate& b) { return a + (-1.0) * b; }

Estimate operator*(double c, const Estimate& e) {
  Estimate r = e;
  r.value *= c;
  r.error_bound *= std::abs(c);
  return r;
}

Estimate power(const Estimate& e, double p) {
  Estimate r = e;
  double v = std::max(0.0, e.value);
  r.value = std::pow(v, p);
  double lo = std::pow(std::max(0.0, v - e.error_bound), p);
  double hi = std::pow(v + e.error_bound, p);
  r.error_bound = std::max(std::abs(hi - r.value), std::abs(r.value - lo));
  return r;
}

Estimate ratio(const Estimate& a, const Estimate& b) {
  Estimate r = a + b;
  r.value = a.value / b.value;
  double db = std::abs(b.value) - b.error_bound;
  if (db <= 0.0) {
    r.error_bound = kInf;
  } else {
    r.error_bound = (a.error_bound + std::abs(r.value) * b.error_bound) / db;
  }
  return r;
}

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

Estimate MultiEstimate::component(int k) const {
  Estimate e;
  e.value = value[k];
  e.error_bound = error[k];
  e.work = work;
  e.status = status;
  return e;
}

// ---------------------------------------------------------------- 1-D engine

MultiEstimate integrate_1d_multi(int K, const MultiIntegrand& f, double a, double b, const Options1D& opt) {
  if (K < 1 || K > kMaxK) throw DomainError("integrate_1d_multi supports 1..8 components");
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integration limits must not be NaN");
  MultiEstimate result;
  result.value.assign(K, 0.0);
  result.error.assign(K, 0.0);
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  if (a == b) return result;

  auto segs = build_segments(a, b, opt);
  std::vector<Panel> panels;
  for (size_t i = 0; i < segs.size(); ++i) {
    int pieces = segs[i].kind == MapKind::identity ? 1 : 6;
    double w = (segs[i].t1 - segs[i].t0) / pieces;
    for (int j = 0; j < pieces; ++j) {
      Panel p{};
      p.seg = static_cast<int>(i);
      p.ta = segs[i].t0 + j * w;
      p.tb = j + 1 == pieces ? segs[i].t1 : segs[i].t0 + (j + 1) * w;
      panels.push_back(p);
    }
  }
  Engine engine(K, f, opt);
  engine.evaluate(panels, segs);

  auto totals = [&](std::vector<double>& val, std::vector<double>& err) {
    val.assign(K, 0.0);
    err.assign(K, 0.0);
    for (int k = 0; k < K; ++k) {
      CompensatedSum sv, se;
      for (const auto& p : panels) {
        sv.add(p.val[k]);
        se.add(p.err[k]);
      }
      val[k] = sv.value();
      err[k] = se.value();
    }
  };
  auto converged = [&](const std::vector<double>& val, const std::vector<double>& err) {
    double joint = 0.0;
    if (opt.joint_tolerance)
      for (int k = 0; k < K; ++k) joint = std::max(joint, std::abs(val[k]));
    for (int k = 0; k < K; ++k)
      if (err[k] > std::max(opt.abs_tol, opt.rel_tol * std::max(joint, std::abs(val[k])))) return false;
    return true;
  };

  std::vector<double> val, err;
  totals(val, err);
  int subdivisions = 0;
  bool ok = converged(val, err);
  while (!ok && subdivisions < opt.max_subdivisions) {
    int worst = -1;
    for (size_t i = 0; i < panels.size(); ++i)
      if (panels[i].splittable && (worst < 0 || panels[i].priority > panels[worst].priority)) worst = static_cast<int>(i);
    if (worst < 0) break;
    Panel parent = panels[worst];
    double mid = 0.5 * (parent.ta + parent.tb);
    std::vector<Panel> kids(2, parent);
    kids[0].tb = mid;
    kids[1].ta = mid;
    engine.evaluate(kids, segs);
    panels[worst] = kids[0];
    panels.insert(panels.begin() + worst + 1, kids[1]);
    ++subdivisions;
    totals(val, err);
    ok = converged(val, err);
  }

  // Nodes of a mapped segment stop short of its ends (rounding, finite t-range). The skipped piece
  // is estimated as 4 |f(x*)| |x* - end| at the outermost live node x*, which covers |x-end|^{-p}
  // singularities with p <= 3/4 and decaying tails alike.
  std::vector<std::vector<double>> edges(K);
  for (size_t si = 0; si < segs.size(); ++si) {
    const Segment& sg = segs[si];
    if (sg.kind == MapKind::identity) continue;
    const Panel *lo = nullptr, *hi = nullptr;
    for (const auto& p : panels) {
      if (p.seg != static_cast<int>(si)) continue;
      if (p.lo_live && (!lo || p.ta < lo->ta)) lo = &p;
      if (p.hi_live && (!hi || p.tb > hi->tb)) hi = &p;
    }
    double end_lo = sg.kind == MapKind::exp_down ? sg.b : sg.a;
    double end_hi = sg.kind == MapKind::tanh_sinh ? sg.b : kInf;
    if (sg.kind == MapKind::sinh_sinh) end_lo = -kInf;
    const double ref = std::isfinite(sg.a) ? sg.a : (std::isfinite(sg.b) ? sg.b : 0.0);
    auto dist = [&](double x, double end) { return std::isinf(end) ? std::abs(x - ref) : std::abs(x - end); };
    auto residual = [&](double f, double x, double end) { return f == 0.0 ? 0.0 : 4.0 * std::abs(f) * dist(x, end); };
    for (int k = 0; k < K; ++k) {
      if (lo) edges[k].push_back(residual(lo->lo_f[k], lo->lo_x, end_lo));
      if (hi) edges[k].push_back(residual(hi->hi_f[k], hi->hi_x, end_hi));
    }
  }

  for (int k = 0; k < K; ++k) {
    CompensatedSum sp;
    for (const auto& p : panels) sp.add(p.prop[k]);
    for (double r : edges[k]) sp.add(r);
    result.value[k] = sign * val[k];
    result.error[k] = err[k] + sp.value();
  }
  result.work = engine.work();
  result.status = worse(engine.status(), ok ? Status::ok : Status::budget_exhausted);
  return result;
}

Estimate integrate_1d(const std::function<double(double)>& f, double a, double b, const Options1D& opt) {
  MultiIntegrand g = [&](double x, std::span<double> v, std::span<double>, SampleMeta&) { v[0] = f(x); };
  return integrate_1d_multi(1, g, a, b, opt).component(0);
}

Estimate integrate_1d_nested(const std::function<Estimate(double)>& f, double a, double b, const Options1D& opt) {
  MultiIntegrand g = [&](double x, std::span<double> v, std::span<double> e, SampleMeta& meta) {
    Estimate r = f(x);
    v[0] = r.value;
    e[0] = r.error_bound;
    meta.work = std::max<std::uint64_t>(1, r.work);
    meta.status = r.status;
  };
  return integrate_1d_multi(1, g, a, b, opt).component(0);
}

Options1D options_from(const QuadratureSpec& spec, int depth) {
  Options1D o;
  double shrink = std::pow(0.2, depth);
  o.rel_tol = std::max(1e-13, spec.rel_tol * shrink);
  o.abs_tol = std::max(1e-300, spec.abs_tol * shrink);
  o.max_subdivisions = spec.max_subdivisions;
  o.parallel = depth == 0;
  return o;
}

// ---------------------------------------------------------------- Monte Carlo

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Estimate monte_carlo(const std::function<double(const double* u, int dim)>& f, int dim, double measure,
                     const QuadratureSpec& spec) {
  constexpr std::uint64_t kBatch = 1 << 14;
  const std::uint64_t total = spec.sample_budget;
  const std::uint64_t batches = (total + kBatch - 1) / kBatch;
  std::vector<double> sums(batches), sqs(batches);
  parallel_for(batches, [&](size_t bi) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(bi + 1)));
    std::uint64_t count = std::min<std::uint64_t>(kBatch, total - bi * kBatch);
    CompensatedSum s, q;
    double u[8];
    for (std::uint64_t i = 0; i < count; ++i) {
      for (int d = 0; d < dim; ++d) u[d] = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      double v = f(u, dim);
      if (!std::isfinite(v)) throw EvaluationError("Monte Carlo integrand returned a non-finite value");
      s.add(v);
      q.add(v * v);
    }
    sums[bi] = s.value();
    sqs[bi] = q.value();
  });
  CompensatedSum s, q;
  for (std::uint64_t i = 0; i < batches; ++i) {
    s.add(sums[i]);
    q.add(sqs[i]);
  }
  double N = static_cast<double>(total);
  double mean = s.value() / N;
  double var = std::max(0.0, q.value() / N - mean * mean);
  Estimate e;
  e.value = measure * mean;
  e.error_bound = 3.0 * std::abs(measure) * std::sqrt(var / N);
  e.kind = BoundKind::statistical_3sigma;
  e.work = total;
  return e;
}

// ---------------------------------------------------------------- n-D integration

Estimate integrate_sphere(int n, const std::function<Estimate(const Vec&)>& f, const QuadratureSpec& spec, int depth) {
  if (n == 1) return f(Vec{1.0}) + f(Vec{-1.0});
  if (n == 2) {
    auto o = options_from(spec, depth);
    return integrate_1d_nested([&](double a) { return f(Vec{std::cos(a), std::sin(a)}); }, 0.0, 2 * kPi, o);
  }
  if (n == 3) {
    auto o = options_from(spec, depth);
    return integrate_1d_nested(
        [&](double z) {
          double sz = std::sqrt(std::max(0.0, 1 - z * z));
          auto oi = options_from(spec, depth + 1);
          return integrate_1d_nested([&](double g) { return f(Vec{sz * std::cos(g), sz * std::sin(g), z}); }, 0.0,
                                     2 * kPi, oi);
        },
        -1.0, 1.0, o);
  }
  throw DomainError("integrate_sphere supports n = 1, 2, 3");
}

namespace {

Estimate integrate_box_adaptive(const Integrand& F, const BoxDomain& box, const QuadratureSpec& spec) {
  const int n = box.lo.n;
  std::function<Estimate(int, Vec)> level = [&](int d, Vec x) -> Estimate {
    auto o = options_from(spec, d);
    if (F.singular_point) o.singular.push_back((*F.singular_point)[d]);
    if (d == n - 1) {
      return integrate_1d(
          [&, d, x](double t) {
            Vec y = x;
            y[d] = t;
            return F.f(y);
          },
          box.lo[d], box.hi[d], o);
    }
    return integrate_1d_nested(
        [&, d, x](double t) {
          Vec y = x;
          y[d] = t;
          return level(d + 1, y);
        },
        box.lo[d], box.hi[d], o);
  };
  return level(0, Vec(n));
}

Estimate integrate_polar(const Integrand& F, const Vec& center, double radius, const QuadratureSpec& spec) {
  const int n = center.n;
  return integrate_sphere(
      n,
      [&](const Vec& dir) {
        auto o = options_from(spec, n == 1 ? 0 : (n == 2 ? 1 : 2));
        o.singular.push_back(0.0);
        if (std::isinf(radius)) o.scale = 1.0;
        return integrate_1d(
            [&](double r) {
              double jac = std::pow(r, n - 1);
              if (jac == 0.0) return 0.0;
              return F.f(center + r * dir) * jac;
            },
            0.0, radius, o);
      },
      spec);
}

}  // namespace

Estimate integrate(const Integrand& F, const Domain& domain, const QuadratureSpec& spec) {
  spec.validate();
  if (spec.method == Method::montecarlo) {
    return std::visit(
        [&](const auto& d) -> Estimate {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, BoxDomain> || std::is_same_v<T, ClippedBox>) {
            const BoxDomain& box = [&]() -> const BoxDomain& {
              if constexpr (std::is_same_v<T, BoxDomain>)
                return d;
              else
                return d.box;
            }();
            int n = box.lo.n;
            double vol = 1.0;
            for (int i = 0; i < n; ++i) vol *= box.hi[i] - box.lo[i];
            return monte_carlo(
                [&](const double* u, int) {
                  Vec x(n);
                  for (int i = 0; i < n; ++i) x[i] = box.lo[i] + u[i] * (box.hi[i] - box.lo[i]);
                  if constexpr (std::is_same_v<T, ClippedBox>) {
                    if (!d.region.contains(x)) return 0.0;
                  }
                  return F.f(x);
                },
                n, vol, spec);
          } else if constexpr (std::is_same_v<T, Window>) {
            int n = d.center.n;
            double vol = unit_ball_volume(n) * std::pow(d.radius, n);
            return monte_carlo(
                [&](const double* u, int) {
                  Vec x(n);
                  double r = d.radius * std::pow(u[0], 1.0 / n);
                  if (n == 1) {
                    x[0] = u[1] < 0.5 ? -r : r;
                  } else if (n == 2) {
                    x = Vec{r * std::cos(2 * kPi * u[1]), r * std::sin(2 * kPi * u[1])};
                  } else {
                    double z = 2 * u[1] - 1, sz = std::sqrt(std::max(0.0, 1 - z * z));
                    x = Vec{r * sz * std::cos(2 * kPi * u[2]), r * sz * std::sin(2 * kPi * u[2]), r * z};
                  }
                  return F.f(d.center + x);
                },
                std::max(2, n), vol, spec);
          } else {
            throw DomainError("Monte Carlo integration over all of R^n is not supported; use a window");
          }
        },
        domain);
  }
  return std::visit(
      [&](const auto& d) -> Estimate {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BoxDomain>) {
          if (d.lo.n != d.hi.n) throw DomainError("box corners differ in dimension");
          return integrate_box_adaptive(F, d, spec);
        } else if constexpr (std::is_same_v<T, Window>) {
          return integrate_polar(F, d.center, d.radius, spec);
        } else if constexpr (std::is_same_v<T, AllSpace>) {
          return integrate_polar(F, Vec::zero(d.n), kInf, spec);
        } else {
          const int n = d.box.lo.n;
          std::function<Estimate(int, Vec)> level = [&](int k, Vec x) -> Estimate {
            auto o = options_from(spec, k);
            if (k == n - 1) {
              Vec origin = x;
              origin[k] = 0.0;
              auto ivs = d.region.line_intervals(origin, Vec::unit(n, k));
              ivs = interval_intersection(ivs, IntervalSet{{d.box.lo[k], d.box.hi[k]}});
              Estimate total;
              for (const auto& iv : ivs) {
                total = total + integrate_1d(
                                    [&](double t) {
                                      Vec y = origin;
                                      y[k] = t;
                                      return F.f(y);
                                    },
                                    iv.lo, iv.hi, o);
              }
              return total;
            }
            return integrate_1d_nested(
                [&, k, x](double t) {
                  Vec y = x;
                  y[k] = t;
                  return level(k + 1, y);
                },
                d.box.lo[k], d.box.hi[k], o);
          };
          return level(0, Vec(n));
        }
      },
      domain);
}

double tail_integral(double rho, const FractionalParams& params) {
  if (!(rho > 0.0)) throw DomainError("tail_integral requires rho > 0");
  return sphere_area(params.n) * std::pow(rho, -params.s) / params.s;
}

}  // namespace fracsurf
