#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracsurf/extension.hpp"
#include "fracsurf/fracperim.hpp"
#include "fracsurf/geometry.hpp"
#include "fracsurf/verify.hpp"

namespace fracsurf {

inline constexpr int kSchemaVersion = 1;

enum class Command { compute, check, scan };
const char* to_string(Command c);

enum class Quantity { per_s, mean_curvature_s, phi, gagliardo, extend, interpolation_lhs };
const char* to_string(Quantity q);

// One scanned parameter: R, s, height or scale (dilation of the whole configuration).
struct ScanGrid {
  std::string parameter;
  std::vector<double> values;
};

// Inputs of a single quantity evaluation; unused members keep their defaults.
struct QuantityInputs {
  Quantity quantity = Quantity::per_s;
  std::optional<Region> region;
  BoundarySelector probe{"origin", {}};
  std::optional<TestFunction> function;
  std::optional<Window> window;
  PerimeterForm form = PerimeterForm::three_term;
  EnergyDensity density = EnergyDensity::automatic;
  SeminormParams seminorm{0.5, 2.0};
  SeminormDomain seminorm_domain = AllSpaceDomain{};
  Vec point_base;
  double height = 1.0;
  double R = 1.0;
  std::optional<Vec> center;
};

struct ExperimentConfig {
  Command command = Command::compute;
  FractionalParams params;
  QuadratureSpec spec;
  QuantityInputs inputs;  // compute and scan
  CheckConfig check;      // check
  ScanGrid grid;          // scan
  // The parsed document re-serialized in canonical form; echoed into reports.
  std::string canonical;
};

// Parses and validates a JSON experiment file. Throws ConfigError whose field is a JSON
// pointer (e.g. /region/type); syntax errors carry line and column in the message.
ExperimentConfig parse_config(std::string_view text);

// Evaluates one quantity.
Estimate evaluate(const QuantityInputs& in, const FractionalParams& params, const QuadratureSpec& spec);

// The inputs with every length multiplied by lambda.
QuantityInputs dilated(const QuantityInputs& in, double lambda);

}  // namespace fracsurf
