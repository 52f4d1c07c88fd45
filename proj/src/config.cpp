#include "fracsurf/config.hpp"

#include <json.hpp>

#include <cmath>
#include <set>

#include "fracsurf/errors.hpp"

namespace fracsurf {

using json = nlohmann::json;

const char* to_string(Command c) {
  switch (c) {
    case Command::compute: return "compute";
    case Command::check: return "check";
    case Command::scan: return "scan";
  }
  return "?";
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::per_s: return "per_s";
    case Quantity::mean_curvature_s: return "mean_curvature_s";
    case Quantity::phi: return "phi";
    case Quantity::gagliardo: return "gagliardo";
    case Quantity::extend: return "extend";
    case Quantity::interpolation_lhs: return "interpolation_lhs";
  }
  return "?";
}

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, size_t i) { return path + "/" + std::to_string(i); }

void only_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(at(path, k), "unknown field");
}

const json& need(const json& j, const std::string& path, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(at(path, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

Vec vec(const json& j, const std::string& path, int n) {
  std::vector<double> v = numbers(j, path);
  if (static_cast<int>(v.size()) != n) throw ConfigError(path, "expected " + std::to_string(n) + " components");
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = v[i];
  return out;
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

Region region(const json& j, const std::string& path, int n) {
  if (!j.is_object()) throw ConfigError(path, "expected a region object");
  const std::string type = text(need(j, path, "type"), at(path, "type"));
  auto child = [&](const char* key) { return region(need(j, path, key), at(path, key), n); };
  if (type == "half_space") {
    only_keys(j, path, {"type", "normal", "offset"});
    Vec nv = vec(need(j, path, "normal"), at(path, "normal"), n);
    double off = j.contains("offset") ? number(j["offset"], at(path, "offset")) : 0.0;
    return wrap(path, [&] { return Region::half_space(nv, off); });
  }
  if (type == "ball") {
    only_keys(j, path, {"type", "center", "radius"});
    Vec c = vec(need(j, path, "center"), at(path, "center"), n);
    double r = positive(need(j, path, "radius"), at(path, "radius"));
    return wrap(path, [&] { return Region::ball(c, r); });
  }
  if (type == "slab") {
    only_keys(j, path, {"type", "direction", "lower", "upper"});
    Vec d = vec(need(j, path, "direction"), at(path, "direction"), n);
    double lo = number(need(j, path, "lower"), at(path, "lower"));
    double hi = number(need(j, path, "upper"), at(path, "upper"));
    return wrap(path, [&] { return Region::slab(d, lo, hi); });
  }
  if (type == "interval") {
    only_keys(j, path, {"type", "lower", "upper"});
    if (n != 1) throw ConfigError(at(path, "type"), "interval needs n = 1");
    double lo = number(need(j, path, "lower"), at(path, "lower"));
    double hi = number(need(j, path, "upper"), at(path, "upper"));
    return wrap(path, [&] { return Region::slab(Vec{1.0}, lo, hi); });
  }
  if (type == "cross_cone") {
    only_keys(j, path, {"type", "apex", "rotation"});
    if (n != 2) throw ConfigError(at(path, "type"), "cross_cone needs n = 2");
    Vec apex = j.contains("apex") ? vec(j["apex"], at(path, "apex"), 2) : Vec{0.0, 0.0};
    double rot = j.contains("rotation") ? number(j["rotation"], at(path, "rotation")) : 0.0;
    return wrap(path, [&] { return Region::cross_cone_2d(apex, rot); });
  }
  if (type == "empty") {
    only_keys(j, path, {"type"});
    return Region::empty(n);
  }
  if (type == "complement") {
    only_keys(j, path, {"type", "of"});
    return child("of").complement();
  }
  if (type == "union" || type == "intersection") {
    only_keys(j, path, {"type", "of"});
    const json& of = need(j, path, "of");
    const std::string p = at(path, "of");
    if (!of.is_array() || of.size() < 2) throw ConfigError(p, "expected an array of at least two regions");
    Region acc = region(of[0], at(p, 0), n);
    for (size_t i = 1; i < of.size(); ++i) {
      Region r = region(of[i], at(p, i), n);
      acc = type == "union" ? set_union(acc, r) : set_intersection(acc, r);
    }
    return acc;
  }
  if (type == "transformed") {
    only_keys(j, path, {"type", "of", "scale", "translate"});
    double sc = j.contains("scale") ? positive(j["scale"], at(path, "scale")) : 1.0;
    Vec t = j.contains("translate") ? vec(j["translate"], at(path, "translate"), n) : Vec::zero(n);
    Region r = child("of");
    return wrap(path, [&] { return r.transformed(sc, t); });
  }
  throw ConfigError(at(path, "type"), "unknown region type '" + type + "'");
}

TestFunction function(const json& j, const std::string& path, int n) {
  if (!j.is_object()) throw ConfigError(path, "expected a function object");
  const std::string type = text(need(j, path, "type"), at(path, "type"));
  if (type == "constant") {
    only_keys(j, path, {"type", "value"});
    return TestFunction::constant(n, number(need(j, path, "value"), at(path, "value")));
  }
  if (type == "bump") {
    only_keys(j, path, {"type", "center", "radius", "height"});
    Vec c = vec(need(j, path, "center"), at(path, "center"), n);
    double r = positive(need(j, path, "radius"), at(path, "radius"));
    double h = j.contains("height") ? number(j["height"], at(path, "height")) : 1.0;
    return wrap(path, [&] { return TestFunction::bump(c, r, h); });
  }
  if (type == "gaussian") {
    only_keys(j, path, {"type", "center", "width"});
    Vec c = vec(need(j, path, "center"), at(path, "center"), n);
    double w = positive(need(j, path, "width"), at(path, "width"));
    return wrap(path, [&] { return TestFunction::gaussian(c, w); });
  }
  if (type == "indicator") {
    only_keys(j, path, {"type", "region"});
    return TestFunction::indicator(region(need(j, path, "region"), at(path, "region"), n));
  }
  if (type == "radial_power") {
    only_keys(j, path, {"type", "exponent"});
    double e = number(need(j, path, "exponent"), at(path, "exponent"));
    return wrap(path, [&] { return TestFunction::radial_power(n, e); });
  }
  if (type == "affine") {
    only_keys(j, path, {"type", "coeffs", "offset"});
    Vec c = vec(need(j, path, "coeffs"), at(path, "coeffs"), n);
    double off = j.contains("offset") ? number(j["offset"], at(path, "offset")) : 0.0;
    return TestFunction::affine(c, off);
  }
  if (type == "sampled") {
    only_keys(j, path, {"type", "lower", "upper", "values"});
    if (n != 1) throw ConfigError(at(path, "type"), "sampled functions need n = 1");
    double lo = number(need(j, path, "lower"), at(path, "lower"));
    double hi = number(need(j, path, "upper"), at(path, "upper"));
    std::vector<double> v = numbers(need(j, path, "values"), at(path, "values"));
    return wrap(path, [&] { return TestFunction::sampled(lo, hi, v); });
  }
  if (type == "kelvin") {
    only_keys(j, path, {"type", "of"});
    return kelvin_extend(function(need(j, path, "of"), at(path, "of"), n));
  }
  if (type == "rescaled") {
    only_keys(j, path, {"type", "of", "scale", "translate"});
    double sc = positive(need(j, path, "scale"), at(path, "scale"));
    Vec t = j.contains("translate") ? vec(j["translate"], at(path, "translate"), n) : Vec::zero(n);
    TestFunction u = function(need(j, path, "of"), at(path, "of"), n);
    return wrap(path, [&] { return u.rescaled(sc, t); });
  }
  throw ConfigError(at(path, "type"), "unknown function type '" + type + "'");
}

Window window(const json& j, const std::string& path, int n) {
  only_keys(j, path, {"center", "radius"});
  Vec c = j.contains("center") ? vec(j["center"], at(path, "center"), n) : Vec::zero(n);
  return Window(c, positive(need(j, path, "radius"), at(path, "radius")));
}

BoundarySelector probe(const json& j, const std::string& path) {
  only_keys(j, path, {"selector", "values"});
  BoundarySelector sel{text(need(j, path, "selector"), at(path, "selector")), {}};
  if (j.contains("values")) sel.values = numbers(j["values"], at(path, "values"));
  return sel;
}

QuadratureSpec spec(const json& j, const std::string& path) {
  only_keys(j, path,
            {"method", "rel_tol", "abs_tol", "max_subdivisions", "truncation_radius", "pv_epsilon", "sample_budget", "seed"});
  QuadratureSpec q;
  auto count = [&](const char* key) -> std::uint64_t {
    const json& v = j[key];
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(at(path, key), "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  };
  if (j.contains("method")) {
    std::string m = text(j["method"], at(path, "method"));
    if (m == "adaptive")
      q.method = Method::adaptive;
    else if (m == "montecarlo")
      q.method = Method::montecarlo;
    else
      throw ConfigError(at(path, "method"), "expected 'adaptive' or 'montecarlo'");
  }
  if (j.contains("rel_tol")) q.rel_tol = number(j["rel_tol"], at(path, "rel_tol"));
  if (j.contains("abs_tol")) q.abs_tol = number(j["abs_tol"], at(path, "abs_tol"));
  if (j.contains("max_subdivisions")) q.max_subdivisions = static_cast<int>(count("max_subdivisions"));
  if (j.contains("truncation_radius")) q.truncation_radius = number(j["truncation_radius"], at(path, "truncation_radius"));
  if (j.contains("pv_epsilon")) q.pv_epsilon = number(j["pv_epsilon"], at(path, "pv_epsilon"));
  if (j.contains("sample_budget")) q.sample_budget = count("sample_budget");
  if (j.contains("seed")) q.seed = count("seed");
  wrap(path, [&] {
    q.validate();
    return 0;
  });
  return q;
}

std::optional<Quantity> quantity_from(const std::string& name) {
  for (Quantity q : {Quantity::per_s, Quantity::mean_curvature_s, Quantity::phi, Quantity::gagliardo, Quantity::extend,
                     Quantity::interpolation_lhs})
    if (name == to_string(q)) return q;
  return std::nullopt;
}

const std::set<std::string> kCommon = {"schema_version", "command", "target", "params", "spec"};

std::set<std::string> quantity_keys(Quantity q) {
  switch (q) {
    case Quantity::per_s: return {"region", "window", "form"};
    case Quantity::mean_curvature_s: return {"region", "probe"};
    case Quantity::phi: return {"region", "probe", "R", "density"};
    case Quantity::gagliardo: return {"function", "seminorm"};
    case Quantity::extend: return {"region", "point"};
    case Quantity::interpolation_lhs: return {"function", "region", "R", "center"};
  }
  return {};
}

QuantityInputs quantity_inputs(const json& j, Quantity q, int n) {
  QuantityInputs in;
  in.quantity = q;
  if (j.contains("region")) in.region = region(j["region"], "/region", n);
  if (j.contains("function")) in.function = function(j["function"], "/function", n);
  if (j.contains("probe")) in.probe = probe(j["probe"], "/probe");
  switch (q) {
    case Quantity::per_s:
      need(j, "", "region");
      in.window = window(need(j, "", "window"), "/window", n);
      if (j.contains("form")) {
        std::string f = text(j["form"], "/form");
        if (f == "three_term")
          in.form = PerimeterForm::three_term;
        else if (f == "q_form")
          in.form = PerimeterForm::q_form;
        else
          throw ConfigError("/form", "expected 'three_term' or 'q_form'");
      }
      break;
    case Quantity::mean_curvature_s:
      need(j, "", "region");
      break;
    case Quantity::phi:
      need(j, "", "region");
      in.R = positive(need(j, "", "R"), "/R");
      if (j.contains("density")) {
        std::string d = text(j["density"], "/density");
        if (d == "automatic")
          in.density = EnergyDensity::automatic;
        else if (d == "closed_form")
          in.density = EnergyDensity::closed_form;
        else if (d == "convolution")
          in.density = EnergyDensity::convolution;
        else
          throw ConfigError("/density", "expected 'automatic', 'closed_form' or 'convolution'");
      }
      break;
    case Quantity::gagliardo: {
      need(j, "", "function");
      const json& sm = need(j, "", "seminorm");
      only_keys(sm, "/seminorm", {"alpha", "p", "domain"});
      double alpha = number(need(sm, "/seminorm", "alpha"), "/seminorm/alpha");
      double p = number(need(sm, "/seminorm", "p"), "/seminorm/p");
      in.seminorm = wrap("/seminorm", [&] { return SeminormParams(alpha, p); });
      if (sm.contains("domain")) {
        const json& d = sm["domain"];
        if (d.is_string()) {
          if (d.get<std::string>() != "all_space") throw ConfigError("/seminorm/domain", "expected 'all_space' or a window");
        } else {
          in.seminorm_domain = window(d, "/seminorm/domain", n);
        }
      }
      break;
    }
    case Quantity::extend: {
      need(j, "", "region");
      const json& pt = need(j, "", "point");
      only_keys(pt, "/point", {"base", "height"});
      in.point_base = vec(need(pt, "/point", "base"), "/point/base", n);
      in.height = positive(need(pt, "/point", "height"), "/point/height");
      break;
    }
    case Quantity::interpolation_lhs:
      if (in.region && in.function) throw ConfigError("/function", "give either function or region, not both");
      if (!in.region && !in.function) throw ConfigError("/function", "missing required field (or give region)");
      if (in.region) in.function = TestFunction::indicator(*in.region);
      in.R = positive(need(j, "", "R"), "/R");
      if (j.contains("center")) in.center = vec(j["center"], "/center", n);
      break;
  }
  return in;
}

CheckConfig check_config(const json& j, CheckId id, const FractionalParams& params, const QuadratureSpec& q) {
  CheckConfig c;
  c.check_id = id;
  c.params = params;
  c.spec = q;
  const int n = params.n;
  if (j.contains("region")) c.region = region(j["region"], "/region", n);
  if (j.contains("probe")) c.probe = probe(j["probe"], "/probe");
  if (j.contains("radii")) c.radii = numbers(j["radii"], "/radii");
  if (j.contains("epsilons")) c.epsilons = numbers(j["epsilons"], "/epsilons");
  if (j.contains("functions")) {
    const json& fs = j["functions"];
    if (!fs.is_array()) throw ConfigError("/functions", "expected an array of functions");
    for (size_t i = 0; i < fs.size(); ++i) c.functions.push_back(function(fs[i], at("/functions", i), n));
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("/tolerances", "expected an object of numbers");
    for (const auto& [k, v] : t.items()) c.tolerances[k] = number(v, at("/tolerances", k));
  }
  if (j.contains("samples")) {
    const json& s = j["samples"];
    if (!s.is_number_integer() || s.get<long long>() <= 0) throw ConfigError("/samples", "expected a positive integer");
    c.samples = s.get<std::uint64_t>();
  }
  c.validate();
  return c;
}

}  // namespace

ExperimentConfig parse_config(std::string_view src) {
  json j;
  try {
    j = json::parse(src);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", e.what());
  }
  only_keys(j, "", {"schema_version", "command", "target", "params", "spec", "region", "probe", "function", "functions",
                    "window", "form", "density", "seminorm", "point", "R", "center", "radii", "epsilons", "tolerances",
                    "samples", "grid"});
  const json& ver = need(j, "", "schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
    throw ConfigError("/schema_version", "unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");

  ExperimentConfig cfg;
  const std::string cmd = text(need(j, "", "command"), "/command");
  if (cmd == "compute")
    cfg.command = Command::compute;
  else if (cmd == "check")
    cfg.command = Command::check;
  else if (cmd == "scan")
    cfg.command = Command::scan;
  else
    throw ConfigError("/command", "expected 'compute', 'check' or 'scan'");

  const json& pj = need(j, "", "params");
  only_keys(pj, "/params", {"n", "s"});
  const json& nj = need(pj, "/params", "n");
  if (!nj.is_number_integer()) throw ConfigError("/params/n", "expected an integer");
  const double s = number(need(pj, "/params", "s"), "/params/s");
  cfg.params = wrap("/params", [&] { return FractionalParams(nj.get<int>(), s); });
  if (j.contains("spec")) cfg.spec = spec(j["spec"], "/spec");

  const std::string target = text(need(j, "", "target"), "/target");
  std::set<std::string> allowed = kCommon;
  if (cfg.command == Command::check) {
    auto id = check_id_from_string(target);
    if (!id) throw ConfigError("/target", "unknown check '" + target + "'");
    allowed.insert({"region", "probe", "functions", "radii", "epsilons", "tolerances", "samples"});
    only_keys(j, "", allowed);
    cfg.check = check_config(j, *id, cfg.params, cfg.spec);
  } else {
    auto q = quantity_from(target);
    if (!q) throw ConfigError("/target", "unknown quantity '" + target + "'");
    allowed.merge(quantity_keys(*q));
    if (cfg.command == Command::scan) allowed.insert("grid");
    only_keys(j, "", allowed);
    if (cfg.command == Command::scan) {
      const json& g = need(j, "", "grid");
      only_keys(g, "/grid", {"parameter", "values"});
      cfg.grid.parameter = text(need(g, "/grid", "parameter"), "/grid/parameter");
      cfg.grid.values = numbers(need(g, "/grid", "values"), "/grid/values");
      const std::string& par = cfg.grid.parameter;
      if (par != "R" && par != "s" && par != "height" && par != "scale")
        throw ConfigError("/grid/parameter", "expected 'R', 's', 'height' or 'scale'");
      if ((par == "R") && *q != Quantity::phi && *q != Quantity::interpolation_lhs)
        throw ConfigError("/grid/parameter", "R is scanned only for phi and interpolation_lhs");
      if (par == "height" && *q != Quantity::extend) throw ConfigError("/grid/parameter", "height is scanned only for extend");
      if (cfg.grid.values.empty()) throw ConfigError("/grid/values", "grid must be nonempty");
      for (size_t i = 0; i < cfg.grid.values.size(); ++i) {
        double v = cfg.grid.values[i];
        if (par == "s" ? !(v > 0.0 && v < 1.0) : !(v > 0.0))
          throw ConfigError(at("/grid/values", i), par == "s" ? "must lie in (0,1)" : "must be positive");
      }
    }
    cfg.inputs = quantity_inputs(j, *q, cfg.params.n);
  }
  cfg.canonical = j.dump();
  return cfg;
}

Estimate evaluate(const QuantityInputs& in, const FractionalParams& params, const QuadratureSpec& spec) {
  switch (in.quantity) {
    case Quantity::per_s: return per_s(*in.region, *in.window, params, spec, in.form);
    case Quantity::mean_curvature_s:
      return mean_curvature_s(*in.region, boundary_probe(*in.region, in.probe), params, spec);
    case Quantity::phi: return phi(*in.region, boundary_probe(*in.region, in.probe), in.R, params, spec, in.density);
    case Quantity::gagliardo: return gagliardo_power(*in.function, in.seminorm, in.seminorm_domain, spec);
    case Quantity::extend: return extend(*in.region, UpperHalfPoint(in.point_base, in.height), params, spec);
    case Quantity::interpolation_lhs: return interpolation_lhs(*in.function, in.R, params, spec, in.center);
  }
  throw DomainError("unknown quantity");
}

QuantityInputs dilated(const QuantityInputs& in, double lambda) {
  QuantityInputs out = in;
  const int n = in.region ? in.region->dim() : in.function->dim();
  const Vec zero = Vec::zero(n);
  if (in.region) out.region = in.region->transformed(lambda, zero);
  if (in.function) {
    if (const Region* e = in.function->indicator_region())
      out.function = TestFunction::indicator(e->transformed(lambda, zero));
    else
      out.function = in.function->rescaled(1.0 / lambda, zero);
  }
  if (in.window) out.window = Window(lambda * in.window->center, lambda * in.window->radius);
  if (const auto* w = std::get_if<Window>(&in.seminorm_domain)) out.seminorm_domain = Window(lambda * w->center, lambda * w->radius);
  if (in.probe.name != "angle")
    for (double& v : out.probe.values) v *= lambda;
  out.point_base = lambda * in.point_base;
  out.height = lambda * in.height;
  out.R = lambda * in.R;
  if (in.center) out.center = lambda * *in.center;
  return out;
}

}  // namespace fracsurf
