#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracsurf/errors.hpp"
#include "fracsurf/lines.hpp"
#include "fracsurf/quadrature.hpp"
#include "fracsurf/specialfn.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fracsurf;

namespace {
const double pi = std::numbers::pi;

QuadratureSpec tight() {
  QuadratureSpec q;
  q.rel_tol = 1e-8;
  q.abs_tol = 1e-12;
  return q;
}

void check_honest(const Estimate& e, double truth) {
  CHECK(e.status == Status::ok);
  CHECK(std::abs(e.value - truth) <= e.error_bound + 1e-14 * std::abs(truth));
}

// int_I int_J |t-u|^{-1-s} for bounded disjoint I = (a,b) < J = (c,d): inner integral in closed form,
// outer Gauss-Legendre in the distance to b, graded by delta = (b-a) w^{4/(1-s)}.
double pair_oracle(double a, double b, double c, double d, double s) {
  double gap = c - b, e = 4.0 / (1.0 - s);
  auto inner = [&](double delta) { return (std::pow(gap + delta, -s) - std::pow(gap + delta + (d - c), -s)) / s; };
  auto g = [&](double w) { return inner((b - a) * std::pow(w, e)) * (b - a) * e * std::pow(w, e - 1); };
  return oracle::gauss_legendre(g, 0.0, 1.0, 4000);
}
}  // namespace

TEST_CASE("integrate examples") {
  QuadratureSpec q = tight();
  check_honest(integrate({[](const Vec&) { return 1.0; }, {}}, Window(Vec{0.0, 0.0}, 1.0), q), pi);
  check_honest(integrate({[](const Vec& x) { return std::exp(-dot(x, x)); }, {}}, AllSpace{2}, q), pi);
  check_honest(integrate({[](const Vec& x) { return 1.0 / std::sqrt(std::abs(x[0])); }, Vec{0.0}},
                         BoxDomain{Vec{-1.0}, Vec{1.0}}, q),
               4.0);
}

TEST_CASE("integrate on boxes, clipped boxes and windows in 3D") {
  QuadratureSpec q = tight();
  check_honest(integrate({[](const Vec& x) { return x[0] * x[0] + x[1] * x[2]; }, {}},
                         BoxDomain{Vec{0.0, 0.0, 0.0}, Vec{1.0, 2.0, 1.0}}, q),
               2.0 / 3.0 + 1.0);
  Estimate ball = integrate({[](const Vec&) { return 1.0; }, {}},
                            ClippedBox{BoxDomain{Vec{-1.0, -1.0, -1.0}, Vec{1.0, 1.0, 1.0}},
                                       Region::ball(Vec{0.0, 0.0, 0.0}, 1.0)},
                            q);
  check_honest(ball, 4 * pi / 3);
  check_honest(integrate({[](const Vec& x) { return dot(x, x); }, {}}, Window(Vec{0.0, 0.0, 0.0}, 2.0), q),
               4 * pi * 32 / 5.0);
}

TEST_CASE("integrate reports non-finite integrands with a location") {
  Integrand bad{[](const Vec& x) { return x[0] > 0.5 ? std::nan("") : 1.0; }, {}};
  CHECK_THROWS_AS(integrate(bad, BoxDomain{Vec{0.0}, Vec{1.0}}, QuadratureSpec{}), EvaluationError);
}

TEST_CASE("integrate_1d maps handle endpoint singularities and infinite ranges") {
  Options1D o = options_from(tight());
  o.singular = {0.0};
  Estimate e = integrate_1d([](double x) { return std::pow(x, -0.9); }, 0.0, 1.0, o);
  check_honest(e, 10.0);
  Options1D inf = options_from(tight());
  Estimate g = integrate_1d([](double x) { return std::exp(-x * x); }, -kInfinity, kInfinity, inf);
  check_honest(g, std::sqrt(pi));
  Estimate t = integrate_1d([](double x) { return std::pow(1 + x, -1.5); }, 0.0, kInfinity, inf);
  check_honest(t, 2.0);
}

TEST_CASE("deterministic mode is bit identical") {
  QuadratureSpec q;
  Integrand f{[](const Vec& x) { return std::exp(-dot(x, x)) * (1 + x[0]); }, {}};
  Estimate a = integrate(f, Window(Vec{0.1, 0.2}, 1.5), q);
  Estimate b = integrate(f, Window(Vec{0.1, 0.2}, 1.5), q);
  CHECK(a.value == b.value);
  CHECK(a.error_bound == b.error_bound);
}

TEST_CASE("Monte Carlo is seeded and statistically honest") {
  QuadratureSpec q;
  q.method = Method::montecarlo;
  q.sample_budget = 1 << 18;
  q.seed = 42;
  auto f = [](const double* u, int) { return u[0] * u[1]; };
  Estimate a = monte_carlo(f, 2, 1.0, q);
  Estimate b = monte_carlo(f, 2, 1.0, q);
  CHECK(a.value == b.value);
  CHECK(a.kind == BoundKind::statistical_3sigma);
  CHECK(std::abs(a.value - 0.25) <= a.error_bound);
  q.seed = 43;
  CHECK(monte_carlo(f, 2, 1.0, q).value != a.value);
}

TEST_CASE("tail_integral examples") {
  CHECK(tail_integral(1.0, FractionalParams(1, 0.5)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(tail_integral(1.0, FractionalParams(2, 0.5)) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(tail_integral(4.0, FractionalParams(1, 0.5)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("pair_interaction against a quadrature oracle") {
  for (int i = 0; i < 40; ++i) {
    double s = gen::uniform(0.1, 0.9);
    double a = gen::uniform(-2, 0), b = a + gen::uniform(0.1, 2);
    double gap = i % 2 == 0 ? 0.0 : gen::uniform(0.01, 1.0);
    double c = b + gap, d = c + gen::uniform(0.1, 2);
    double ref = pair_oracle(a, b, c, d, s);
    INFO(a, " ", b, " ", c, " ", d, " ", s);
    CHECK(pair_interaction({{a, b}}, {{c, d}}, s) == doctest::Approx(ref).epsilon(1e-7));
    CHECK(pair_interaction({{c, d}}, {{a, b}}, s) == doctest::Approx(ref).epsilon(1e-7));
  }
  CHECK(pair_interaction({{0, 1}}, {{2, kInfinity}}, 0.5) == doctest::Approx(4 * (std::sqrt(2.0) - 1)).epsilon(1e-12));
  CHECK_THROWS_AS(pair_interaction({{0, 2}}, {{1, 3}}, 0.5), DivergenceError);
  CHECK_THROWS_AS(pair_interaction({{-kInfinity, 0}}, {{1, kInfinity}}, 0.5), DivergenceError);
}

TEST_CASE("q_form_line equals the three interaction terms on a line") {
  // On a single line, q-form and three-term splitting describe the same quantity.
  for (int i = 0; i < 40; ++i) {
    double s = gen::uniform(0.1, 0.9);
    IntervalSet E{{gen::uniform(-3, -1), gen::uniform(-0.5, 0.5)}};
    if (i % 2) E.push_back({gen::uniform(1.0, 1.5), gen::uniform(2.0, 3.5)});
    Interval W{-1.2, 1.7};
    IntervalSet Wi{W}, Ec = interval_complement(E);
    double three = pair_interaction(interval_intersection(E, Wi), interval_intersection(Ec, Wi), s) +
                   pair_interaction(interval_intersection(E, Wi), interval_difference(Ec, Wi), s) +
                   pair_interaction(interval_difference(E, Wi), interval_intersection(Ec, Wi), s);
    CHECK(q_form_line(E, W, s) == doctest::Approx(three).epsilon(1e-11));
  }
}

TEST_CASE("pv_line for an interval at its endpoint") {
  // (chi_{E^c} - chi_E) at offset r from the probe 1 of (-1,1): principal value is 2 * 2^{-s} / s.
  for (double s : {0.2, 0.5, 0.8}) {
    LinePV v = pv_line({{-2.0, 0.0}}, s, 1e-12);
    CHECK(v.divergent == doctest::Approx(0.0));
    CHECK(v.finite_part == doctest::Approx(2 * std::pow(2.0, -s) / s).epsilon(1e-13));
  }
  // Probe inside E: both sides inside, so the symmetric limit diverges.
  LinePV inside = pv_line({{-1.0, 1.0}}, 0.5, 0.0);
  CHECK(inside.divergent == -2.0);
  LinePV one_sided = pv_line({{0.0, 1.0}}, 0.5, 0.0);
  CHECK(one_sided.divergent == 0.0);
}

TEST_CASE("interaction_integral examples") {
  FractionalParams p(1, 0.5);
  QuadratureSpec q = tight();
  Region A = Region::ball(Vec{0.0}, 1.0), B = Region::ball(Vec{0.0}, 2.0).complement();
  // Inner integral in closed form, outer by Gauss-Legendre.
  double ref = oracle::gauss_legendre([](double x) { return (std::pow(2 - x, -0.5) + std::pow(2 + x, -0.5)) / 0.5; },
                                      -1.0, 1.0, 200);
  Estimate ab = interaction_integral(A, B, std::nullopt, p, q);
  check_honest(ab, ref);
  Estimate ba = interaction_integral(B, A, std::nullopt, p, q);
  CHECK(std::abs(ab.value - ba.value) <= ab.error_bound + ba.error_bound);
  CHECK_THROWS_AS(interaction_integral(A, Region::ball(Vec{0.5}, 1.0), std::nullopt, p, q), DivergenceError);
}

TEST_CASE("property: interaction_integral symmetry and scaling in 2D") {
  QuadratureSpec q;
  q.rel_tol = 1e-6;
  for (int i = 0; i < 3; ++i) {
    FractionalParams p(2, gen::uniform(0.2, 0.8));
    Vec c = gen::point(2, 0.3);
    Region A = Region::ball(c, 0.5);
    Region B = set_intersection(Region::ball(Vec{0.0, 0.0}, 2.0), Region::ball(c, 0.8).complement());
    Estimate ab = interaction_integral(A, B, std::nullopt, p, q);
    Estimate ba = interaction_integral(B, A, std::nullopt, p, q);
    CHECK(std::abs(ab.value - ba.value) <= ab.error_bound + ba.error_bound);
    double lam = gen::uniform(0.5, 2.0);
    Estimate sc = interaction_integral(transform(A, lam, Vec{0.0, 0.0}), transform(B, lam, Vec{0.0, 0.0}),
                                       std::nullopt, p, q);
    double f = std::pow(lam, 2 - p.s);
    CHECK(std::abs(sc.value - f * ab.value) <= sc.error_bound + f * ab.error_bound);
  }
}

TEST_CASE("pv_kernel_integral examples") {
  QuadratureSpec q = tight();
  FractionalParams p1(1, 0.5);
  Region I = Region::ball(Vec{0.0}, 1.0);
  Estimate e = pv_kernel_integral(I, boundary_probe(I, {"pole", {}}), p1, q);
  check_honest(e, 2 * std::pow(2.0, -0.5) / 0.5);

  FractionalParams p2(2, 0.5);
  Region H = Region::half_space(Vec{0.0, 1.0}, 0.0);
  Estimate h = pv_kernel_integral(H, boundary_probe(H, {"origin", {}}), p2, q);
  CHECK(h.status == Status::ok);
  CHECK(std::abs(h.value) <= h.error_bound + 1e-12);

  Region C = Region::cross_cone_2d();
  Estimate c = pv_kernel_integral(C, boundary_probe(C, {"axis1", {1.0}}), p2, q);
  CHECK(c.status == Status::ok);
  CHECK(std::abs(c.value) <= c.error_bound + 1e-10);
}

TEST_CASE("pv_kernel_integral of a disc against a line oracle") {
  // Through the pole, the line at angle a from the tangent meets the disc in a chord of length
  // 2 sin a ending at the probe; that line contributes 2 L^{-s} / s.
  double s = 0.5;
  auto line = [s](double a) { return 2 * std::pow(2 * std::sin(a), -s) / s; };
  auto g = [&](double w) { return line(0.5 * pi * w * w) * pi * w; };
  double ref = 2 * oracle::gauss_legendre(g, 0.0, 1.0, 2000);
  Region D = Region::ball(Vec{0.0, 0.0}, 1.0);
  Estimate h = pv_kernel_integral(D, boundary_probe(D, {"pole", {}}), FractionalParams(2, s), tight());
  check_honest(h, ref);
}
