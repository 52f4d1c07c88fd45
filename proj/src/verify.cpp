#include "fracsurf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fracsurf/errors.hpp"

namespace fracsurf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Estimate exact(double v) {
  Estimate e;
  e.value = v;
  e.work = 1;
  return e;
}

// Uniform double in [0,1) from the top 53 bits; identical on every platform.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

CheckReport start(const CheckConfig& cfg) {
  CheckReport r;
  r.check_id = cfg.check_id;
  r.spec = cfg.spec;
  r.seed = cfg.spec.seed;
  r.verdict = Verdict::pass;
  return r;
}

// Adds a measured estimate; flagged estimates make the verdict at best inconclusive.
const Estimate& record(CheckReport& r, const std::string& name, const Estimate& e) {
  r.measured.push_back({name, e});
  if (!e.ok()) {
    r.verdict = combine(r.verdict, Verdict::inconclusive);
    r.notes.push_back(name + ": " + to_string(e.status));
  }
  return r.measured.back().estimate;
}

void row(CheckReport& r, std::vector<double> coords, const std::string& quantity, const Estimate& e) {
  r.rows.push_back({std::move(coords), quantity, e});
}

const Region& need_region(const CheckConfig& cfg) {
  if (!cfg.region) throw ConfigError("region", "this check needs a region");
  return *cfg.region;
}

std::vector<double> ascending(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// max/min of positive ratios below `factor`, judged on the bound-widened extremes.
Verdict stable_ratios(const std::vector<Estimate>& ratios, double factor) {
  if (ratios.empty()) return Verdict::pass;
  bool all_zero = true;
  double hi_up = 0.0, lo_down = kInf, hi_down = 0.0, lo_up = kInf;
  for (const auto& q : ratios) {
    if (!std::isfinite(q.value) || !std::isfinite(q.error_bound)) return q.ok() ? Verdict::fail : Verdict::inconclusive;
    if (q.value != 0.0 || q.error_bound != 0.0) all_zero = false;
    hi_up = std::max(hi_up, q.value + q.error_bound);
    lo_down = std::min(lo_down, q.value - q.error_bound);
    hi_down = std::max(hi_down, q.value - q.error_bound);
    lo_up = std::min(lo_up, q.value + q.error_bound);
  }
  if (all_zero) return Verdict::pass;
  if (lo_down > 0.0 && hi_up < factor * lo_down) return Verdict::pass;
  if (lo_up <= 0.0 || hi_down >= factor * lo_up) return Verdict::fail;
  return Verdict::inconclusive;
}

// Half-spaces, cross cones and their complements.
bool stationary(const Region& E) {
  const Region* r = &E;
  if (auto* c = std::get_if<shape::Complement>(&E.shape())) r = c->child.get();
  return std::holds_alternative<shape::HalfSpace>(r->shape()) || std::holds_alternative<shape::CrossCone>(r->shape());
}

bool is_cross_cone(const Region& E) {
  const Region* r = &E;
  if (auto* c = std::get_if<shape::Complement>(&E.shape())) r = c->child.get();
  return std::holds_alternative<shape::CrossCone>(r->shape());
}

// x -> u(lambda x); indicators stay indicators of the dilated set.
TestFunction dilate(const TestFunction& u, double lambda) {
  if (const Region* e = u.indicator_region()) return TestFunction::indicator(e->transformed(1.0 / lambda, Vec::zero(u.dim())));
  return u.rescaled(lambda, Vec::zero(u.dim()));
}

double ball_volume(int n, double r) {
  const double pi = std::numbers::pi;
  double unit = n == 1 ? 2.0 : (n == 2 ? pi : 4.0 * pi / 3.0);
  return unit * std::pow(r, n);
}

}  // namespace

const char* to_string(CheckId id) {
  switch (id) {
    case CheckId::interpolation: return "interpolation";
    case CheckId::lemma_indicator: return "lemma_indicator";
    case CheckId::extension_trace: return "extension_trace";
    case CheckId::monotonicity_and_limit: return "monotonicity_and_limit";
    case CheckId::energy_identity: return "energy_identity";
    case CheckId::kelvin_and_poincare: return "kelvin_and_poincare";
    case CheckId::replay_density_chain: return "replay_density_chain";
  }
  return "?";
}

std::optional<CheckId> check_id_from_string(const std::string& name) {
  for (CheckId id : {CheckId::interpolation, CheckId::lemma_indicator, CheckId::extension_trace,
                     CheckId::monotonicity_and_limit, CheckId::energy_identity, CheckId::kelvin_and_poincare,
                     CheckId::replay_density_chain})
    if (name == to_string(id)) return id;
  return std::nullopt;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::pass;
}

Verdict decide_le(const Estimate& a, double threshold) {
  if (!std::isfinite(a.value)) return Verdict::inconclusive;
  if (a.value + a.error_bound <= threshold) return Verdict::pass;
  if (a.value - a.error_bound > threshold) return Verdict::fail;
  return Verdict::inconclusive;
}

Verdict decide_ge(const Estimate& a, double threshold) {
  Estimate neg = -1.0 * a;
  return decide_le(neg, -threshold);
}

bool agree_within_bounds(const Estimate& a, const Estimate& b) {
  return std::abs(a.value - b.value) <= a.error_bound + b.error_bound + 1e-12 * std::max(std::abs(a.value), std::abs(b.value));
}

double CheckConfig::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

void CheckConfig::validate() const {
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ConfigError("spec", e.what());
  }
  if (region && region->dim() != params.n) throw ConfigError("region", "dimension does not match params.n");
  for (size_t i = 0; i < functions.size(); ++i)
    if (functions[i].dim() != params.n)
      throw ConfigError("functions/" + std::to_string(i), "dimension does not match params.n");
  for (size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw ConfigError("radii/" + std::to_string(i), "must be positive");
  auto sorted = [](const std::vector<double>& v) {
    return std::is_sorted(v.begin(), v.end()) || std::is_sorted(v.rbegin(), v.rend());
  };
  if (!sorted(radii)) throw ConfigError("radii", "grid must be sorted");
  if (!sorted(epsilons)) throw ConfigError("epsilons", "grid must be sorted");
  const double eps_max = std::pow(3.0, -1.0 / params.s);
  for (size_t i = 0; i < epsilons.size(); ++i)
    if (!(epsilons[i] > 0.0 && epsilons[i] < eps_max))
      throw ConfigError("epsilons/" + std::to_string(i), "must lie in (0, 3^{-1/s}) = (0, " + std::to_string(eps_max) + ")");
  const bool grid_checks = check_id == CheckId::interpolation || check_id == CheckId::extension_trace ||
                           check_id == CheckId::monotonicity_and_limit || check_id == CheckId::replay_density_chain;
  if (grid_checks && radii.empty()) throw ConfigError("radii", "grid must be nonempty");
  if (check_id == CheckId::interpolation && epsilons.empty()) throw ConfigError("epsilons", "grid must be nonempty");
  if (check_id == CheckId::lemma_indicator && samples < 100'000) throw ConfigError("samples", "at least 100000 samples");
  if (check_id == CheckId::energy_identity && functions.empty()) throw ConfigError("functions", "list must be nonempty");
  if (check_id == CheckId::kelvin_and_poincare && functions.empty()) throw ConfigError("functions", "list must be nonempty");
}

// ---------------------------------------------------------------- interpolation

CheckReport check_interpolation(const CheckConfig& cfg) {
  cfg.validate();
  CheckReport r = start(cfg);
  const int n = cfg.params.n;
  const double s = cfg.params.s;
  TestFunction u = !cfg.functions.empty() ? cfg.functions.front() : TestFunction::indicator(need_region(cfg));
  const double sup = u.sup_norm();
  if (!std::isfinite(sup)) throw ConfigError("functions/0", "interpolation needs bounded data");
  r.grid_columns = {"epsilon", "R"};
  // Per radius, the ratio at the least favourable epsilon; that is the constant the inequality needs.
  std::vector<Estimate> ratios(cfg.radii.size(), exact(-kInf));
  double worst = 0.0;
  for (double eps : cfg.epsilons) {
    for (size_t k = 0; k < cfg.radii.size(); ++k) {
      const double R = cfg.radii[k];
      const double delta = 1.0 + std::pow(eps, -1.0 / s);
      Estimate lhs = interpolation_lhs(u, R, cfg.params, cfg.spec);
      Estimate tv = total_variation(u, Window(Vec::zero(n), delta * R), cfg.spec);
      Estimate bracket = (std::pow(eps, -(1.0 - s) / s) * std::pow(R, 1.0 - s) / (1.0 - s)) * tv +
                         exact(eps * std::pow(R, n - s) / s * sup);
      Estimate q = bracket.value > 0.0 ? ratio(lhs, bracket) : exact(0.0);
      row(r, {eps, R}, "lhs", record(r, "lhs", lhs));
      row(r, {eps, R}, "bracket", record(r, "bracket", bracket));
      row(r, {eps, R}, "ratio", q);
      if (q.value > ratios[k].value) ratios[k] = q;
      worst = std::max(worst, q.value);
    }
  }
  r.empirical_constants.push_back({"max_ratio", worst});
  r.verdict = combine(r.verdict, stable_ratios(ratios, cfg.tolerance("stability", 10.0)));

  const double R = cfg.radii.back();
  Estimate direct = interpolation_lhs(u, R, cfg.params, cfg.spec);
  Estimate scaled = std::pow(R, n - s) * interpolation_lhs(dilate(u, R), 1.0, cfg.params, cfg.spec);
  row(r, {0.0, R}, "scaling_direct", record(r, "scaling_direct", direct));
  row(r, {0.0, R}, "scaling_rescaled", record(r, "scaling_rescaled", scaled));
  if (!agree_within_bounds(direct, scaled)) {
    r.verdict = Verdict::fail;
    r.notes.push_back("scaling row disagrees beyond bounds");
  }
  return r;
}

// ---------------------------------------------------------------- indicator lemma

CheckReport check_lemma_indicator(const CheckConfig& cfg) {
  cfg.validate();
  CheckReport r = start(cfg);
  const int n = cfg.params.n;
  const double box = cfg.tolerance("box", 3.0);
  auto lemma_holds = [&](const Vec& x, const Vec& y, double t) {
    bool lhs = in_q_set(x - t * y, x + (1.0 - t) * y, 1.0);
    bool rhs = norm(x) <= norm(y) + 1.0;
    return !lhs || rhs;
  };
  r.grid_columns = {"case"};
  row(r, {0.0}, "origin_pair", exact(lemma_holds(Vec::zero(n), Vec::zero(n), 0.5) ? 1.0 : 0.0));
  row(r, {1.0}, "far_pair", exact(lemma_holds(5.0 * Vec::unit(n, 0), Vec::zero(n), 0.3) ? 1.0 : 0.0));

  std::mt19937_64 rng(cfg.spec.seed);
  std::uint64_t violations = 0;
  for (std::uint64_t i = 0; i < cfg.samples; ++i) {
    Vec x(n), y(n);
    for (int k = 0; k < n; ++k) x[k] = box * (2.0 * unit_draw(rng) - 1.0);
    for (int k = 0; k < n; ++k) y[k] = box * (2.0 * unit_draw(rng) - 1.0);
    double t = unit_draw(rng);
    if (!lemma_holds(x, y, t)) ++violations;
  }
  Estimate v = exact(static_cast<double>(violations));
  v.work = cfg.samples;
  record(r, "violations", v);
  row(r, {2.0}, "violations", v);
  r.empirical_constants.push_back({"samples", static_cast<double>(cfg.samples)});
  if (violations != 0 || r.rows[0].estimate.value != 1.0 || r.rows[1].estimate.value != 1.0) r.verdict = Verdict::fail;
  return r;
}

// ---------------------------------------------------------------- extension-trace

CheckReport check_extension_trace(const CheckConfig& cfg) {
  cfg.validate();
  CheckReport r = start(cfg);
  const Region& E = need_region(cfg);
  const int n = cfg.params.n;
  const double s = cfg.params.s;
  BoundaryProbe probe = boundary_probe(E, cfg.probe);
  r.grid_columns = {"R"};
  std::vector<Estimate> ratios;
  double worst = 0.0;
  for (double R : cfg.radii) {
    Estimate f = record(r, "phi", phi(E, probe, R, cfg.params, cfg.spec));
    Estimate p = record(r, "per_s_2R", per_s(E, Window(probe.point, 2.0 * R), cfg.params, cfg.spec));
    Estimate q = ratio((s * std::pow(R, n - s)) * f, p);
    row(r, {R}, "phi", f);
    row(r, {R}, "per_s_2R", p);
    row(r, {R}, "ratio", q);
    ratios.push_back(q);
    worst = std::max(worst, q.value);
    if (!(q.value > 0.0)) r.verdict = combine(r.verdict, q.ok() ? Verdict::fail : Verdict::inconclusive);
  }
  r.empirical_constants.push_back({"max_ratio", worst});
  r.verdict = combine(r.verdict, stable_ratios(ratios, cfg.tolerance("stability", 10.0)));
  return r;
}

// ---------------------------------------------------------------- monotonicity and limit

CheckReport check_monotonicity_and_limit(const CheckConfig& cfg) {
  cfg.validate();
  CheckReport r = start(cfg);
  const Region& E = need_region(cfg);
  BoundaryProbe probe = boundary_probe(E, cfg.probe);
  const double c = closed_constant(ClosedConstantId::phi_half, cfg.params);
  r.grid_columns = {"R"};
  row(r, {0.0}, "phi_half", exact(c));
  r.empirical_constants.push_back({"phi_half", c});

  std::vector<double> radii = ascending(cfg.radii);
  std::vector<Estimate> values;
  for (double R : radii) {
    Estimate f = record(r, "phi", phi(E, probe, R, cfg.params, cfg.spec));
    row(r, {R}, "phi", f);
    values.push_back(f);
  }

  if (!stationary(E)) {
    r.notes.push_back("monotonicity clause skipped: region is not a half-space or cross-cone");
  } else {
    Verdict mono = Verdict::pass;
    for (size_t k = 0; k + 1 < values.size(); ++k) {
      Estimate step = values[k + 1] - values[k];
      row(r, {radii[k + 1]}, "phi_increment", step);
      if (step.value + step.error_bound < 0.0) mono = Verdict::fail;
    }
    if (is_cross_cone(E))
      r.notes.push_back(std::string("cross-cone monotonicity (informational): ") + to_string(mono));
    else
      r.verdict = combine(r.verdict, mono);
  }

  if (!probe.smooth) {
    r.notes.push_back("limit clause skipped: probe is not a smooth boundary point");
  } else {
    const double tol = cfg.tolerance("limit", 0.05);
    Estimate gap = values.front() - exact(c);
    gap.value = std::abs(gap.value);
    row(r, {radii.front()}, "limit_gap", gap);
    r.empirical_constants.push_back({"limit_relative_gap", gap.value / c});
    r.verdict = combine(r.verdict, decide_le(gap, tol * c));
  }
  return r;
}

// ---------------------------------------------------------------- energy identity

CheckReport check_energy_identity(const CheckConfig& cfg) {
  cfg.validate();
  if (cfg.params.n != 1) throw ConfigError("params/n", "the energy identity check is implemented for n = 1");
  CheckReport r = start(cfg);
  const double s = cfg.params.s, n = cfg.params.n;
  const double c = closed_constant(ClosedConstantId::ext_energy, cfg.params);
  const double tol = cfg.tolerance("relative", 0.02);
  const SeminormParams sp(0.5 * s, 2.0);
  r.grid_columns = {"function"};
  r.empirical_constants.push_back({"ext_energy", c});
  double worst = 0.0;
  std::optional<size_t> first_nonzero;
  for (size_t i = 0; i < cfg.functions.size(); ++i) {
    const TestFunction& u = cfg.functions[i];
    Estimate energy = record(r, "energy", weighted_dirichlet_energy(u, cfg.params, cfg.spec));
    Estimate rhs = c * record(r, "seminorm_power", gagliardo_power(u, sp, AllSpaceDomain{}, cfg.spec));
    double gap = std::abs(energy.value - rhs.value);
    row(r, {double(i)}, "energy", energy);
    row(r, {double(i)}, "constant_times_seminorm", rhs);
    if (energy.value != 0.0) {
      worst = std::max(worst, gap / std::abs(energy.value));
      if (!first_nonzero) first_nonzero = i;
    }
    if (gap > tol * std::abs(energy.value) + energy.error_bound + rhs.error_bound) {
      r.verdict = Verdict::fail;
      r.notes.push_back(u.describe() + ": sides differ by " + std::to_string(gap));
    }
  }
  r.empirical_constants.push_back({"max_relative_gap", worst});
  if (first_nonzero) {
    const double lambda = cfg.tolerance("lambda", 2.0);
    const TestFunction& u = cfg.functions[*first_nonzero];
    Estimate base = r.rows[2 * *first_nonzero].estimate;
    Estimate scaled = weighted_dirichlet_energy(u.rescaled(lambda, Vec::zero(1)), cfg.params, cfg.spec);
    Estimate expect = std::pow(lambda, s - n) * base;
    row(r, {double(*first_nonzero)}, "scaled_energy", record(r, "scaled_energy", scaled));
    row(r, {double(*first_nonzero)}, "scaling_prediction", expect);
    if (!agree_within_bounds(scaled, expect)) {
      r.verdict = Verdict::fail;
      r.notes.push_back("energy scaling row disagrees beyond bounds");
    }
  }
  return r;
}

// ---------------------------------------------------------------- Kelvin and Poincare

CheckReport check_kelvin_and_poincare(const CheckConfig& cfg) {
  cfg.validate();
  CheckReport r = start(cfg);
  const int n = cfg.params.n;
  const double s = cfg.params.s;
  r.grid_columns = {"function"};

  std::mt19937_64 rng(cfg.spec.seed);
  const auto pairs = static_cast<std::uint64_t>(cfg.tolerance("pairs", 1e5));
  double deviation = 0.0;
  for (std::uint64_t i = 0; i < pairs; ++i) {
    Vec x(n), y(n);
    for (int k = 0; k < n; ++k) x[k] = 4.0 * (2.0 * unit_draw(rng) - 1.0);
    for (int k = 0; k < n; ++k) y[k] = 4.0 * (2.0 * unit_draw(rng) - 1.0);
    if (norm(x) < 1e-3 || norm(y) < 1e-3) continue;
    Vec xi = (1.0 / norm2(x)) * x, yi = (1.0 / norm2(y)) * y;
    double lhs = norm(xi - yi) * norm(x) * norm(y), rhs = norm(x - y);
    deviation = std::max(deviation, std::abs(lhs - rhs) / std::max(1.0, rhs));
  }
  Estimate dev = exact(deviation);
  dev.work = pairs;
  row(r, {-1.0}, "inversion_distance_deviation", record(r, "inversion_distance_deviation", dev));
  if (!(deviation < 1e-12)) r.verdict = Verdict::fail;

  const SeminormParams sp(cfg.tolerance("alpha", 0.5), cfg.tolerance("p", 2.0));
  double worst_factor = 0.0, worst_poincare = 0.0;
  for (size_t i = 0; i < cfg.functions.size(); ++i) {
    const TestFunction& u = cfg.functions[i];
    const double idx = static_cast<double>(i);
    if (n == 1) {
      Estimate inner = record(r, "seminorm_ball", gagliardo_power(u, sp, Window(Vec::zero(1), 1.0), cfg.spec));
      Estimate outer = record(r, "seminorm_kelvin", gagliardo_power(kelvin_extend(u), sp, AllSpaceDomain{}, cfg.spec));
      row(r, {idx}, "seminorm_ball", inner);
      row(r, {idx}, "seminorm_kelvin", outer);
      r.verdict = combine(r.verdict, decide_le(outer - 4.0 * inner, 0.0));
      if (inner.value > 0.0) worst_factor = std::max(worst_factor, outer.value / inner.value);
    } else {
      r.notes.push_back("Kelvin clause evaluated for n = 1 only");
    }

    Window B2(Vec::zero(n), 2.0);
    Estimate mass = integrate(Integrand{[&](const Vec& x) { return u(x); }, std::nullopt}, B2, cfg.spec);
    const double avg = mass.value / ball_volume(n, 2.0);
    Estimate l2 = record(r, "l2_deviation",
                         integrate(Integrand{[&](const Vec& x) { return (u(x) - avg) * (u(x) - avg); }, std::nullopt}, B2,
                                   cfg.spec));
    Estimate dbl = record(r, "double_integral", gagliardo_power(u, SeminormParams(0.5 * s, 2.0), B2, cfg.spec));
    row(r, {idx}, "l2_deviation", l2);
    row(r, {idx}, "double_integral", dbl);
    Estimate k = dbl.value > 0.0 ? ratio(l2, dbl) : exact(0.0);
    row(r, {idx}, "poincare_constant", k);
    if (!std::isfinite(k.value) || (dbl.value == 0.0 && l2.value > 1e-12)) {
      r.verdict = Verdict::fail;
      r.notes.push_back(u.describe() + ": Poincare ratio not finite");
    }
    worst_poincare = std::max(worst_poincare, k.value);
  }
  r.empirical_constants.push_back({"max_kelvin_factor", worst_factor});
  r.empirical_constants.push_back({"max_poincare_constant", worst_poincare});
  return r;
}

// ---------------------------------------------------------------- density chain

CheckReport replay_density_chain(const CheckConfig& cfg) {
  cfg.validate();
  const Region& E = need_region(cfg);
  if (!stationary(E)) throw ConfigError("region", "the density chain needs a half-space or cross-cone");
  CheckReport r = start(cfg);
  const int n = cfg.params.n;
  const double s = cfg.params.s;
  BoundaryProbe probe = boundary_probe(E, cfg.probe);
  const Vec& x = probe.point;

  Estimate H = mean_curvature_s(E, probe, cfg.params, cfg.spec);
  if (std::abs(H.value) > H.error_bound + cfg.tolerance("curvature", 1e-8))
    throw ConfigError("region", "measured curvature " + std::to_string(H.value) + " is not zero at the probe");
  record(r, "curvature", H);

  const double eps = cfg.epsilons.empty() ? 0.5 * std::pow(3.0, -1.0 / s) : cfg.epsilons.front();
  const double delta = 1.0 + std::pow(eps, -1.0 / s);
  std::vector<double> radii = ascending(cfg.radii);
  // Phi is monotone for these sets, so its value at the smallest radius bounds it below everywhere.
  Estimate phi_small = record(r, "phi_small_radius", phi(E, probe, radii.front(), cfg.params, cfg.spec));
  r.grid_columns = {"R"};
  row(r, {radii.front()}, "phi_small_radius", phi_small);

  struct Level {
    double R, bracket_per, bracket_const;
    Estimate trace, interp;
  };
  std::vector<Level> levels;
  std::vector<double> direct;
  std::vector<Estimate> phis;
  for (double R : radii) {
    Level L{R, 0.0, 0.0, {}, {}};
    Estimate per2 = record(r, "per_s_2R", per_s(E, Window(x, 2.0 * R), cfg.params, cfg.spec));
    Estimate lhs =
        record(r, "interpolation_lhs", interpolation_lhs(TestFunction::indicator(E), 2.0 * R, cfg.params, cfg.spec, x));
    const double per_big = classical_perimeter(E, Window(x, 2.0 * delta * R));
    L.bracket_per = std::pow(eps, -(1.0 - s) / s) * std::pow(2.0 * R, 1.0 - s) / (1.0 - s);
    L.bracket_const = eps * std::pow(2.0 * R, n - s) / s;
    const double bracket = L.bracket_per * per_big + L.bracket_const;
    L.trace = ratio((s * std::pow(R, n - s)) * phi_small, per2);
    L.interp = (1.0 / bracket) * lhs;
    const double d = classical_perimeter(E, Window(x, R)) / std::pow(R, n - 1);
    direct.push_back(d);
    row(r, {R}, "per_s_2R", per2);
    row(r, {R}, "interpolation_lhs", lhs);
    row(r, {R}, "interpolation_bracket", exact(bracket));
    row(r, {R}, "trace_ratio", L.trace);
    row(r, {R}, "interpolation_ratio", L.interp);
    row(r, {R}, "direct_ratio", exact(d));
    Estimate f = record(r, "phi", phi(E, probe, R, cfg.params, cfg.spec));
    row(r, {R}, "phi", f);
    phis.push_back(f);
    levels.push_back(L);
  }

  Estimate trace_max = levels.front().trace, interp_max = levels.front().interp;
  for (const auto& L : levels) {
    if (L.trace.value > trace_max.value) trace_max = L.trace;
    if (L.interp.value > interp_max.value) interp_max = L.interp;
  }
  double implied_min = kInf;
  for (const auto& L : levels) {
    // 2 Per_s(B_2R) = LHS <= c_I (A Per(B_{2 delta R}) + B) and Per_s(B_2R) >= Phi s R^{n-s} / c_T.
    Estimate lower_lhs = ratio((2.0 * s * std::pow(L.R, n - s)) * phi_small, trace_max);
    Estimate per_lower = (1.0 / L.bracket_per) * (ratio(lower_lhs, interp_max) - exact(L.bracket_const));
    Estimate implied = std::pow(2.0 * delta * L.R, 1 - n) * per_lower;
    row(r, {L.R}, "implied_density_lower_bound", implied);
    implied_min = std::min(implied_min, implied.value);
  }
  r.empirical_constants.push_back({"max_trace_ratio", trace_max.value});
  r.empirical_constants.push_back({"max_interpolation_ratio", interp_max.value});
  r.empirical_constants.push_back({"min_implied_density", implied_min});
  if (!(implied_min > 0.0)) r.notes.push_back("implied density bound from measured chain constants is vacuous");

  const double dmin = *std::min_element(direct.begin(), direct.end());
  const double dmax = *std::max_element(direct.begin(), direct.end());
  r.empirical_constants.push_back({"min_direct_ratio", dmin});
  r.empirical_constants.push_back({"max_direct_ratio", dmax});
  if (!(dmin > 0.0) || dmax > cfg.tolerance("stability", 10.0) * dmin) r.verdict = Verdict::fail;

  if (!phis.empty()) {
    for (const auto& f : phis)
      if (!agree_within_bounds(f, phis.front())) {
        r.verdict = Verdict::fail;
        r.notes.push_back("phi is not constant across the grid");
        break;
      }
  }
  return r;
}

CheckReport run_check(const CheckConfig& cfg) {
  switch (cfg.check_id) {
    case CheckId::interpolation: return check_interpolation(cfg);
    case CheckId::lemma_indicator: return check_lemma_indicator(cfg);
    case CheckId::extension_trace: return check_extension_trace(cfg);
    case CheckId::monotonicity_and_limit: return check_monotonicity_and_limit(cfg);
    case CheckId::energy_identity: return check_energy_identity(cfg);
    case CheckId::kelvin_and_poincare: return check_kelvin_and_poincare(cfg);
    case CheckId::replay_density_chain: return replay_density_chain(cfg);
  }
  throw ConfigError("check", "unknown check");
}

}  // namespace fracsurf
