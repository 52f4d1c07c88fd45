#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracsurf/extension.hpp"
#include "fracsurf/fracperim.hpp"
#include "fracsurf/geometry.hpp"
#include "fracsurf/quadrature.hpp"
#include "fracsurf/specialfn.hpp"

namespace fracsurf {

enum class CheckId {
  interpolation,
  lemma_indicator,
  extension_trace,
  monotonicity_and_limit,
  energy_identity,
  kelvin_and_poincare,
  replay_density_chain,
};
const char* to_string(CheckId id);
std::optional<CheckId> check_id_from_string(const std::string& name);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct CheckConfig {
  CheckId check_id = CheckId::lemma_indicator;
  std::optional<Region> region;
  BoundarySelector probe{"origin", {}};
  std::vector<double> radii;
  std::vector<double> epsilons;
  std::vector<TestFunction> functions;
  FractionalParams params;
  QuadratureSpec spec;
  // Named thresholds; missing names take per-check defaults.
  std::map<std::string, double> tolerances;
  std::uint64_t samples = 1'000'000;

  double tolerance(const std::string& name, double fallback) const;
  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct NamedEstimate {
  std::string name;
  Estimate estimate;
};

struct NamedValue {
  std::string name;
  double value;
};

// One table row: grid coordinates, the quantity measured there and its estimate.
struct GridRow {
  std::vector<double> coords;
  std::string quantity;
  Estimate estimate;
};

struct CheckReport {
  CheckId check_id;
  Verdict verdict = Verdict::inconclusive;
  std::vector<NamedEstimate> measured;
  std::vector<NamedValue> empirical_constants;
  std::vector<std::string> grid_columns;
  std::vector<GridRow> rows;
  std::vector<std::string> notes;
  QuadratureSpec spec;
  std::uint64_t seed = 0;
};

CheckReport check_interpolation(const CheckConfig& cfg);
CheckReport check_lemma_indicator(const CheckConfig& cfg);
CheckReport check_extension_trace(const CheckConfig& cfg);
CheckReport check_monotonicity_and_limit(const CheckConfig& cfg);
CheckReport check_energy_identity(const CheckConfig& cfg);
CheckReport check_kelvin_and_poincare(const CheckConfig& cfg);
CheckReport replay_density_chain(const CheckConfig& cfg);

CheckReport run_check(const CheckConfig& cfg);

// Tri-state comparisons of an estimate against a threshold.
Verdict decide_le(const Estimate& a, double threshold);
Verdict decide_ge(const Estimate& a, double threshold);
// a and b equal within their combined bounds (plus rounding slack); never inconclusive.
bool agree_within_bounds(const Estimate& a, const Estimate& b);
// Worst of several verdicts: fail over inconclusive over pass.
Verdict combine(Verdict a, Verdict b);

}  // namespace fracsurf
