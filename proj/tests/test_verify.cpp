#include <doctest.h>

#include <cmath>

#include "fracsurf/errors.hpp"
#include "fracsurf/verify.hpp"

using namespace fracsurf;

namespace {

QuadratureSpec with_tol(double rel) {
  QuadratureSpec q;
  q.rel_tol = rel;
  q.abs_tol = 1e-10;
  return q;
}

CheckConfig base(CheckId id, int n, double s) {
  CheckConfig c;
  c.check_id = id;
  c.params = FractionalParams(n, s);
  c.spec = with_tol(1e-3);
  return c;
}

bool has_row(const CheckReport& r, const std::string& quantity) {
  for (const auto& row : r.rows)
    if (row.quantity == quantity) return true;
  return false;
}

}  // namespace

TEST_CASE("check ids round-trip through their names") {
  for (CheckId id : {CheckId::interpolation, CheckId::lemma_indicator, CheckId::extension_trace,
                     CheckId::monotonicity_and_limit, CheckId::energy_identity, CheckId::kelvin_and_poincare,
                     CheckId::replay_density_chain})
    CHECK(check_id_from_string(to_string(id)) == id);
  CHECK_FALSE(check_id_from_string("nope").has_value());
}

TEST_CASE("tri-state decisions") {
  Estimate e;
  e.value = 1.0;
  e.error_bound = 0.1;
  CHECK(decide_le(e, 1.2) == Verdict::pass);
  CHECK(decide_le(e, 0.8) == Verdict::fail);
  CHECK(decide_le(e, 1.05) == Verdict::inconclusive);
  CHECK(decide_ge(e, 0.8) == Verdict::pass);
  CHECK(decide_ge(e, 1.2) == Verdict::fail);
  CHECK(combine(Verdict::pass, Verdict::inconclusive) == Verdict::inconclusive);
  CHECK(combine(Verdict::inconclusive, Verdict::fail) == Verdict::fail);
}

TEST_CASE("config validation names the field") {
  CheckConfig c = base(CheckId::interpolation, 1, 0.5);
  c.region = Region::slab(Vec{1.0}, -1.0, 1.0);
  c.radii = {1.0};
  c.epsilons = {0.2};  // 3^{-2} = 0.111
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "epsilons/0");
  }
  c.epsilons = {0.05};
  c.radii = {1.0, -2.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.radii = {1.0, 0.5, 2.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);

  CheckConfig l = base(CheckId::lemma_indicator, 2, 0.5);
  l.samples = 1000;
  CHECK_THROWS_AS(run_check(l), ConfigError);

  CheckConfig e = base(CheckId::energy_identity, 2, 0.5);
  e.functions = {TestFunction::gaussian(Vec{0.0, 0.0}, 1.0)};
  CHECK_THROWS_AS(run_check(e), ConfigError);
}

TEST_CASE("indicator lemma has no violations") {
  for (int n : {1, 2, 3}) {
    CheckConfig c = base(CheckId::lemma_indicator, n, 0.5);
    c.samples = 100'000;
    c.spec.seed = 7;
    CheckReport r = run_check(c);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.rows.size() == 3);
    CHECK(r.rows.back().estimate.value == 0.0);
  }
}

TEST_CASE("interpolation on an interval") {
  CheckConfig c = base(CheckId::interpolation, 1, 0.5);
  c.region = Region::slab(Vec{1.0}, -1.0, 1.0);
  c.radii = {0.5, 1.0, 2.0};
  c.epsilons = {0.01, 0.1};
  CheckReport r = run_check(c);
  CHECK(r.verdict == Verdict::pass);
  CHECK(has_row(r, "scaling_direct"));
  for (const auto& row : r.rows)
    if (row.quantity == "ratio") CHECK(row.estimate.value <= 1.0);
}

TEST_CASE("extension-trace ratio on a half-line") {
  CheckConfig c = base(CheckId::extension_trace, 1, 0.5);
  c.region = Region::half_space(Vec{1.0}, 0.0);
  c.radii = {0.5, 1.0, 2.0, 4.0};
  CheckReport r = run_check(c);
  CHECK(r.verdict == Verdict::pass);
  double lo = 1e300, hi = 0.0;
  for (const auto& row : r.rows)
    if (row.quantity == "ratio") {
      lo = std::min(lo, row.estimate.value);
      hi = std::max(hi, row.estimate.value);
    }
  CHECK(lo > 0.0);
  CHECK(hi / lo == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("monotonicity and limit for a half-line") {
  CheckConfig c = base(CheckId::monotonicity_and_limit, 1, 0.4);
  c.region = Region::half_space(Vec{1.0}, 0.0).complement();
  c.radii = {0.25, 1.0, 4.0};
  CheckReport r = run_check(c);
  CHECK(r.verdict == Verdict::pass);
  CHECK(has_row(r, "phi_half"));
  CHECK(has_row(r, "phi_increment"));
  CHECK(has_row(r, "limit_gap"));
}

TEST_CASE("monotonicity clause is skipped for non-stationary sets") {
  CheckConfig c = base(CheckId::monotonicity_and_limit, 1, 0.5);
  c.region = Region::slab(Vec{1.0}, -1.0, 1.0);
  c.probe = {"upper", {}};
  c.radii = {0.01, 0.1};
  CheckReport r = run_check(c);
  CHECK_FALSE(has_row(r, "phi_increment"));
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("energy identity for a gaussian in one dimension") {
  CheckConfig c = base(CheckId::energy_identity, 1, 0.5);
  c.spec = with_tol(1e-4);
  c.functions = {TestFunction::gaussian(Vec{0.0}, 1.0), TestFunction::constant(1, 0.0)};
  CheckReport r = run_check(c);
  CHECK(r.verdict == Verdict::pass);
  CHECK(has_row(r, "scaled_energy"));
}

TEST_CASE("Kelvin distance identity and Poincare constant") {
  CheckConfig c = base(CheckId::kelvin_and_poincare, 1, 0.5);
  c.functions = {TestFunction::bump(Vec{0.2}, 0.5), TestFunction::constant(1, 2.0)};
  c.tolerances["pairs"] = 1e4;
  CheckReport r = run_check(c);
  CHECK(r.verdict == Verdict::pass);
  for (const auto& row : r.rows) {
    if (row.quantity == "inversion_distance_deviation") CHECK(row.estimate.value < 1e-12);
    if (row.quantity == "poincare_constant") CHECK(std::isfinite(row.estimate.value));
  }
}

TEST_CASE("density chain rejects sets without a stationary shape") {
  CheckConfig c = base(CheckId::replay_density_chain, 2, 0.5);
  c.region = Region::ball(Vec{0.0, 0.0}, 1.0);
  c.radii = {0.5};
  CHECK_THROWS_AS(run_check(c), ConfigError);
}

TEST_CASE("density chain on a half-line") {
  CheckConfig c = base(CheckId::replay_density_chain, 1, 0.5);
  c.region = Region::half_space(Vec{1.0}, 0.0);
  c.radii = {0.5, 1.0, 2.0};
  CheckReport r = run_check(c);
  CHECK(r.verdict == Verdict::pass);
  CHECK(has_row(r, "implied_density_lower_bound"));
  for (const auto& row : r.rows)
    if (row.quantity == "direct_ratio") CHECK(row.estimate.value == doctest::Approx(1.0));
}

TEST_CASE("density chain on the cross cone at its vertex") {
  CheckConfig c = base(CheckId::replay_density_chain, 2, 0.5);
  c.region = Region::cross_cone_2d();
  c.probe = {"vertex", {}};
  c.radii = {0.5, 1.0, 2.0, 4.0};
  CheckReport r = run_check(c);
  CHECK(r.verdict == Verdict::pass);
  for (const auto& row : r.rows)
    if (row.quantity == "direct_ratio") CHECK(row.estimate.value == doctest::Approx(4.0));
}
