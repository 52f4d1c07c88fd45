#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracsurf/errors.hpp"
#include "fracsurf/geometry.hpp"
#include "fracsurf/specialfn.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fracsurf;

namespace {
const double pi = std::numbers::pi;

// Membership along a line by dense sampling, compared with the exact intervals.
void check_intervals_by_sampling(const Region& E, const Vec& o, const Vec& d) {
  IntervalSet I = E.line_intervals(o, d);
  for (std::size_t k = 1; k < I.size(); ++k) CHECK(I[k - 1].hi < I[k].lo);
  for (int i = 0; i < 400; ++i) {
    double t = -5.0 + 10.0 * (i + 0.37) / 400;
    Vec p = o + t * d;
    bool near_end = false;
    for (const auto& iv : I)
      if (std::abs(t - iv.lo) < 1e-9 || std::abs(t - iv.hi) < 1e-9) near_end = true;
    if (!near_end) CHECK(E.contains(p) == interval_contains(I, t));
  }
}
}  // namespace

TEST_CASE("signed_indicator examples") {
  CHECK(signed_indicator(Region::half_space(Vec{0.0, 1.0}, 0.0), Vec{0.0, 1.0}) == -1);
  CHECK(signed_indicator(Region::ball(Vec{0.0, 0.0}, 1.0), Vec{2.0, 0.0}) == +1);
  CHECK(signed_indicator(Region::cross_cone_2d(), Vec{1.0, -1.0}) == +1);
  CHECK(signed_indicator(Region::cross_cone_2d(), Vec{1.0, 1.0}) == -1);
  // Exact boundary points count as outside.
  CHECK(signed_indicator(Region::half_space(Vec{0.0, 1.0}, 0.0), Vec{3.0, 0.0}) == +1);
  CHECK_THROWS_AS(signed_indicator(Region::ball(Vec{0.0, 0.0}, 1.0), Vec{0.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("constructors validate") {
  CHECK_THROWS_AS(Region::ball(Vec{0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(Region::slab(Vec{1.0}, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(set_union(Region::ball(Vec{0.0}, 1.0), Region::ball(Vec{0.0, 0.0}, 1.0)), DomainError);
  CHECK_THROWS_AS(Window(Vec{0.0}, -1.0), DomainError);
}

TEST_CASE("classical_perimeter examples") {
  Window W2(Vec{0.0, 0.0}, 2.0);
  CHECK(classical_perimeter(Region::half_space(Vec{0.0, 1.0}, 0.0), W2) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(classical_perimeter(Region::ball(Vec{0.0, 0.0}, 1.0), W2) == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(classical_perimeter(Region::half_space(Vec{0.0, 1.0}, 3.0), W2) == 0.0);
  CHECK(classical_perimeter(Region::slab(Vec{1.0, 0.0}, -1.0, 1.0), W2) == doctest::Approx(4 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(classical_perimeter(Region::cross_cone_2d(), W2) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(classical_perimeter(Region::empty(2), W2) == 0.0);
  CHECK_THROWS_AS(classical_perimeter(Region::half_space(Vec{0.0, 1.0}, 2.0), W2), DegenerateConfigurationError);
}

TEST_CASE("classical_perimeter of a half-space follows the chord formula") {
  for (int n = 1; n <= 3; ++n)
    for (int i = 0; i < 20; ++i) {
      double d = gen::uniform(-1.9, 1.9);
      Region H = Region::half_space(gen::unit(n), d);
      double expect = unit_ball_volume(n - 1) * std::pow(4.0 - d * d, (n - 1) / 2.0);
      CHECK(classical_perimeter(H, Window(Vec::zero(n), 2.0)) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("classical_perimeter of a ball cut by the window") {
  // Unit ball centred at (1,0) seen in B_1(0): arc of angle 2*pi/3 on the ball boundary.
  CHECK(classical_perimeter(Region::ball(Vec{1.0, 0.0}, 1.0), Window(Vec{0.0, 0.0}, 1.0)) ==
        doctest::Approx(2 * pi / 3).epsilon(1e-13));
  // n = 3: spherical cap area 2 pi r^2 (1 - cos theta).
  double cap = 2 * pi * (1 - 0.5);
  CHECK(classical_perimeter(Region::ball(Vec{1.0, 0.0, 0.0}, 1.0), Window(Vec{0.0, 0.0, 0.0}, 1.0)) ==
        doctest::Approx(cap).epsilon(1e-13));
}

TEST_CASE("classical_perimeter of composites by boundary quadrature") {
  // Lens: intersection of two unit discs at distance 1; total boundary 2 * (2 pi / 3).
  Region lens = set_intersection(Region::ball(Vec{0.0, 0.0}, 1.0), Region::ball(Vec{1.0, 0.0}, 1.0));
  CHECK(classical_perimeter(lens, Window(Vec{0.5, 0.0}, 3.0)) == doctest::Approx(4 * pi / 3).epsilon(1e-8));
  // Square [-1,1]^2 from two slabs inside a window of radius 1.2: four chords of length 2*sqrt(1.44-1)
  // clipped to the square edges, each edge contributes 2*sqrt(0.44).
  Region sq = set_intersection(Region::slab(Vec{1.0, 0.0}, -1.0, 1.0), Region::slab(Vec{0.0, 1.0}, -1.0, 1.0));
  CHECK(classical_perimeter(sq, Window(Vec{0.0, 0.0}, 1.2)) == doctest::Approx(8 * std::sqrt(0.44)).epsilon(1e-8));
  // Union of two disjoint balls in R^3.
  Region two = set_union(Region::ball(Vec{-2.0, 0.0, 0.0}, 1.0), Region::ball(Vec{2.0, 0.0, 0.0}, 0.5));
  CHECK(classical_perimeter(two, Window(Vec{0.0, 0.0, 0.0}, 5.0)) == doctest::Approx(4 * pi * 1.25).epsilon(1e-8));
}

TEST_CASE("property: cone perimeter scales as R^{n-1}") {
  for (int i = 0; i < 30; ++i) {
    int n = gen::integer(1, 3);
    double R = gen::uniform(0.1, 3.0), lam = gen::uniform(0.2, 5.0);
    Region E = gen::integer(0, 1) == 0 || n != 2 ? Region::half_space(gen::unit(n), 0.0)
                                                  : Region::cross_cone_2d(Vec{0.0, 0.0}, gen::uniform(0, pi));
    double a = classical_perimeter(E, Window(Vec::zero(n), R));
    double b = classical_perimeter(E, Window(Vec::zero(n), lam * R));
    CHECK(b == doctest::Approx(std::pow(lam, n - 1) * a).epsilon(1e-12));
  }
}

TEST_CASE("property: complement negates the signed indicator") {
  for (int i = 0; i < 200; ++i) {
    int n = gen::integer(1, 3);
    Region E = gen::region(n);
    Vec p = gen::point(n, 3.0);
    CHECK(signed_indicator(E.complement(), p) == -signed_indicator(E, p));
  }
}

TEST_CASE("property: transform round trip preserves membership") {
  for (int k = 0; k < 10; ++k) {
    int n = gen::integer(1, 3);
    Region E = gen::region(n);
    double lam = gen::uniform(0.2, 5.0);
    Vec v = gen::point(n, 2.0);
    Region F = transform(transform(E, lam, v), 1.0 / lam, (-1.0 / lam) * v);
    Region T = transform(E, lam, v);
    for (int i = 0; i < 1000; ++i) {
      Vec p = gen::point(n, 3.0);
      CHECK(F.contains(p) == E.contains(p));
      CHECK(T.contains(p) == E.contains((1.0 / lam) * (p - v)));
    }
  }
}

TEST_CASE("transform examples") {
  Region B = transform(Region::ball(Vec{0.0, 0.0}, 1.0), 2.0, Vec{0.0, 0.0});
  CHECK(B.contains(Vec{1.9, 0.0}));
  CHECK(!B.contains(Vec{2.1, 0.0}));
  Region C = transform(Region::ball(Vec{0.0, 0.0}, 1.0), 1.0, Vec{1.0, 0.0});
  CHECK(C.contains(Vec{1.9, 0.0}));
  CHECK(!C.contains(Vec{-0.1, 0.0}));
  Region H = transform(Region::half_space(Vec{0.0, 1.0}, 0.0), 7.0, Vec{0.0, 0.0});
  for (int i = 0; i < 100; ++i) {
    Vec p = gen::point(2, 3.0);
    CHECK(H.contains(p) == (p[1] > 0));
  }
}

TEST_CASE("property: exact line intervals agree with membership sampling") {
  for (int i = 0; i < 200; ++i) {
    int n = gen::integer(1, 3);
    Region E = gen::region(n);
    check_intervals_by_sampling(E, gen::point(n, 1.0), gen::unit(n));
  }
}

TEST_CASE("interval set algebra") {
  IntervalSet a{{0, 2}, {3, 5}}, b{{1, 4}};
  IntervalSet u = interval_union(a, b);
  REQUIRE(u.size() == 1);
  CHECK(u[0].lo == 0);
  CHECK(u[0].hi == 5);
  IntervalSet x = interval_intersection(a, b);
  CHECK(interval_length(x) == doctest::Approx(2.0));
  IntervalSet c = interval_complement(a);
  REQUIRE(c.size() == 3);
  CHECK(std::isinf(c[0].lo));
  CHECK(interval_length(interval_difference(b, a)) == doctest::Approx(1.0));
  CHECK(interval_shift(a, 1.0)[1].lo == 4.0);
}

TEST_CASE("boundary_probe examples") {
  auto p = boundary_probe(Region::half_space(Vec{0.0, 0.0, 1.0}, 0.0), {"origin", {}});
  CHECK(norm(p.point) == 0.0);
  CHECK(p.normal[2] == -1.0);
  CHECK(p.smooth);
  auto q = boundary_probe(Region::ball(Vec{0.0, 0.0, 0.0}, 1.0), {"pole", {}});
  CHECK(q.point[2] == doctest::Approx(1.0));
  CHECK(q.normal[2] == doctest::Approx(1.0));
  auto v = boundary_probe(Region::cross_cone_2d(), {"vertex", {}});
  CHECK(!v.smooth);
  CHECK(norm(v.point) == 0.0);
  CHECK_THROWS_AS(boundary_probe(Region::ball(Vec{0.0, 0.0}, 1.0), {"point", {0.0, 0.0}}), DomainError);
}

TEST_CASE("property: boundary probes flip membership along the normal") {
  for (int i = 0; i < 100; ++i) {
    int n = gen::integer(1, 3);
    Vec c = gen::point(n, 1.0);
    double r = gen::uniform(0.2, 2.0);
    Region B = Region::ball(c, r);
    BoundarySelector sel{"pole", {}};
    if (n == 2) sel = {"angle", {gen::uniform(0.01, pi - 0.01)}};
    auto p = boundary_probe(B, sel);
    CHECK(std::abs(norm(p.point - c) - r) < 1e-12);
    double h = 1e-9;
    CHECK(B.contains(p.point - h * p.normal));
    CHECK(!B.contains(p.point + h * p.normal));
  }
}
