#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracsurf/errors.hpp"
#include "fracsurf/extension.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fracsurf;

namespace {
const double pi = std::numbers::pi;

QuadratureSpec with_tol(double rel) {
  QuadratureSpec q;
  q.rel_tol = rel;
  q.abs_tol = 1e-12;
  return q;
}

// a(n,s) from the test-only Gamma.
double poisson_a_oracle(int n, double s) {
  return static_cast<double>(oracle::gamma_ld(0.5L * (n + s)) /
                             (std::pow(static_cast<long double>(pi), 0.5L * n) * oracle::gamma_ld(0.5L * s)));
}

// int_0^phi sin^{s-1}, graded with phi' = phi w^{1/s}.
double sine_power_partial(double phi, double s) {
  if (phi <= 0.0) return 0.0;
  auto g = [&](double w) {
    double t = phi * std::pow(w, 1.0 / s);
    return std::pow(std::sin(t), s - 1.0) * phi / s * std::pow(w, 1.0 / s - 1.0);
  };
  return oracle::gauss_legendre(g, 0.0, 1.0, 400);
}

// Convolution of the 1-D kernel against sign data for E = (lo, hi). With y = x + h tan(t) the kernel
// measure is a cos^{s-1}(t) dt, so U is a signed sum of integrals of cos^{s-1} over angle ranges.
double extend_interval_oracle(double lo, double hi, double x, double h, double s) {
  double a = poisson_a_oracle(1, s);
  // int_t^{pi/2} cos^{s-1}
  auto tail = [&](double t) {
    if (t >= 0) return sine_power_partial(pi / 2 - t, s);
    return 2.0 * sine_power_partial(pi / 2, s) - sine_power_partial(pi / 2 + t, s);
  };
  double t0 = std::atan((lo - x) / h), t1 = std::atan((hi - x) / h);
  double total = tail(-pi / 2), inside = tail(t0) - tail(t1);
  return a * (total - 2.0 * inside);
}
}  // namespace

TEST_CASE("poisson kernel directly below the point and radial symmetry") {
  for (int n = 1; n <= 3; ++n) {
    for (double s : {0.3, 0.5, 0.7}) {
      FractionalParams p(n, s);
      Vec x = gen::point(n, 1.0);
      double h = gen::uniform(0.1, 2.0);
      UpperHalfPoint X(x, h);
      CHECK(poisson_kernel(X, x, p) == doctest::Approx(poisson_a_oracle(n, s) * std::pow(h, -n)).epsilon(1e-12));
      Vec d = gen::unit(n), e = gen::unit(n);
      double r = gen::uniform(0.1, 3.0);
      CHECK(poisson_kernel(X, x + r * d, p) == doctest::Approx(poisson_kernel(X, x + r * e, p)).epsilon(1e-13));
      CHECK(poisson_kernel(X, x + r * d, p) > 0.0);
    }
  }
}

TEST_CASE("poisson kernel has unit mass") {
  for (int n = 1; n <= 3; ++n) {
    for (double s : {0.3, 0.5, 0.7}) {
      FractionalParams p(n, s);
      for (int k = 0; k < 3; ++k) {
        UpperHalfPoint X(gen::point(n, 2.0), gen::uniform(0.05, 3.0));
        Estimate m = poisson_mass(X, p, with_tol(1e-8));
        CHECK(std::abs(m.value - 1.0) <= 1e-6);
      }
    }
  }
}

TEST_CASE("upper half-space points and energy balls validate") {
  CHECK_THROWS_AS(UpperHalfPoint(Vec{0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(UpperHalfPoint(Vec{0.0}, -1.0), DomainError);
  CHECK_THROWS_AS(EnergyBall(Vec{0.0}, 0.0), DomainError);
  CHECK_NOTHROW(EnergyBall(Vec{0.0, 1.0}, 2.0));
}

TEST_CASE("half-space extension closed form") {
  const double s = 0.5;
  CHECK(halfspace_extension(UpperHalfPoint(Vec{0.0}, 1.0), s) == 0.0);
  CHECK(halfspace_extension(UpperHalfPoint(Vec{1e9}, 1.0), s) == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(halfspace_extension(UpperHalfPoint(Vec{-1e9}, 1.0), s) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(halfspace_extension(UpperHalfPoint(Vec{2.0, 1.0}, 1.0), s) == doctest::Approx(-0.3166).epsilon(2e-3));
}

TEST_CASE("extension of a half-space matches the closed form") {
  for (int n = 1; n <= 3; ++n) {
    for (double s : {0.3, 0.5, 0.7}) {
      FractionalParams p(n, s);
      Region H = Region::half_space(Vec::unit(n, n - 1), 0.0);
      for (int k = 0; k < 3; ++k) {
        UpperHalfPoint X(gen::point(n, 2.0), gen::uniform(0.05, 2.0));
        Estimate u = extend(H, X, p, with_tol(1e-6));
        CHECK(std::abs(u.value - halfspace_extension(X, s)) <= 1e-3);
        auto g = extend_gradient(H, X, p, with_tol(1e-6));
        auto gc = halfspace_extension_gradient(X, s);
        for (int i = 0; i <= n; ++i) CHECK(std::abs(g[i].value - gc[i]) <= 1e-3 * std::max(1.0, std::abs(gc[i])));
        for (int i = 0; i + 1 < n; ++i) CHECK(std::abs(g[i].value) <= g[i].error_bound + 1e-10);
      }
    }
  }
}

TEST_CASE("extension of an interval against a direct convolution oracle") {
  const double s = 0.4;
  FractionalParams p(1, s);
  Region I = Region::slab(Vec{1.0}, -0.5, 1.0);
  for (double x : {-2.0, -0.5, 0.1, 0.9, 3.0}) {
    for (double h : {0.01, 0.3, 2.0}) {
      double o = extend_interval_oracle(-0.5, 1.0, x, h, s);
      Estimate u = extend(I, UpperHalfPoint(Vec{x}, h), p, with_tol(1e-8));
      CHECK(std::abs(u.value - o) <= 1e-6);
    }
  }
}

TEST_CASE("extension stays in [-1,1] and tends to -1 deep inside") {
  for (int trial = 0; trial < 30; ++trial) {
    int n = gen::integer(1, 3);
    Region E = gen::region(n);
    UpperHalfPoint X(gen::point(n, 2.0), gen::uniform(0.01, 3.0));
    Estimate u = extend(E, X, FractionalParams(n, gen::uniform(0.1, 0.9)), with_tol(1e-4));
    CHECK(std::abs(u.value) <= 1.0);
  }
  for (int n = 1; n <= 3; ++n) {
    Region B = Region::ball(Vec::zero(n), 1.0);
    FractionalParams p(n, 0.5);
    CHECK(extend(B, UpperHalfPoint(Vec::zero(n), 1e-12), p, with_tol(1e-6)).value == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(extend(B, UpperHalfPoint(Vec::unit(n, 0) * 3.0, 1e-12), p, with_tol(1e-6)).value ==
          doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("extension gradient agrees with central differences") {
  FractionalParams p(2, 0.6);
  Region E = set_union(Region::ball(Vec{0.0, 0.0}, 1.0), Region::half_space(Vec{0.0, -1.0}, 0.5));
  QuadratureSpec q = with_tol(1e-10);
  for (int k = 0; k < 5; ++k) {
    Vec x = gen::point(2, 1.5);
    double h = gen::uniform(0.2, 1.0), d = 1e-4;
    auto g = extend_gradient(E, UpperHalfPoint(x, h), p, q);
    for (int i = 0; i < 3; ++i) {
      Vec xp = x, xm = x;
      double hp = h, hm = h;
      if (i < 2) {
        xp[i] += d;
        xm[i] -= d;
      } else {
        hp += d;
        hm -= d;
      }
      double fd = (extend(E, UpperHalfPoint(xp, hp), p, q).value - extend(E, UpperHalfPoint(xm, hm), p, q).value) / (2 * d);
      CHECK(std::abs(g[i].value - fd) <= 1e-3 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("phi of a half-space equals the Gamma constant at every radius") {
  FractionalParams p2(2, 0.5);
  Region H = Region::half_space(Vec{0.0, 1.0}, 0.0);
  BoundaryProbe probe{Vec{0.0, 0.0}, Vec{0.0, -1.0}, true};
  for (double R : {0.25, 1.0, 4.0}) {
    Estimate f = phi(H, probe, R, p2, with_tol(1e-6));
    CHECK(std::abs(f.value - 8.0 / 3.0) <= 0.01 * 8.0 / 3.0);
    CHECK(std::abs(f.value - 8.0 / 3.0) <= f.error_bound + 1e-9);
  }
  for (double s : {0.3, 0.7}) {
    FractionalParams p(1, s);
    Region H1 = Region::half_space(Vec{1.0}, 0.0);
    BoundaryProbe b{Vec{0.0}, Vec{-1.0}, true};
    double c = closed_constant(ClosedConstantId::phi_half, p);
    Estimate closed = phi(H1, b, 2.0, p, with_tol(1e-7), EnergyDensity::closed_form);
    Estimate conv = phi(H1, b, 2.0, p, with_tol(1e-7), EnergyDensity::convolution);
    CHECK(closed.value == doctest::Approx(c).epsilon(1e-5));
    CHECK(conv.value == doctest::Approx(c).epsilon(1e-5));
  }
  CHECK_THROWS_AS(phi(Region::ball(Vec{0.0}, 1.0), BoundaryProbe{Vec{1.0}, Vec{1.0}, true}, 1.0, FractionalParams(1, 0.5),
                      QuadratureSpec{}, EnergyDensity::closed_form),
                  DomainError);
}

TEST_CASE("phi scale identity") {
  FractionalParams p(1, 0.5);
  Region E = set_union(Region::slab(Vec{1.0}, -1.0, 0.5), Region::slab(Vec{1.0}, 1.0, 3.0));
  QuadratureSpec q = with_tol(1e-7);
  for (double x0 : {0.5, 1.0}) {
    for (double R : {0.3, 2.0}) {
      Estimate a = phi(E, BoundaryProbe{Vec{x0}, Vec{1.0}, true}, R, p, q);
      Region F = E.transformed(1.0 / R, Vec{-x0 / R});
      Estimate b = phi(F, BoundaryProbe{Vec{0.0}, Vec{1.0}, true}, 1.0, p, q);
      CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound + 1e-10 * a.value);
    }
  }
}

TEST_CASE("phi of the unit ball approaches the half-space constant as R shrinks") {
  FractionalParams p(1, 0.5);
  Region B = Region::ball(Vec{0.0}, 1.0);
  BoundaryProbe probe{Vec{1.0}, Vec{1.0}, true};
  double c = closed_constant(ClosedConstantId::phi_half, p), prev = 1e300;
  for (double R : {0.2, 0.1, 0.05}) {
    double v = phi(B, probe, R, p, with_tol(1e-7)).value;
    CHECK(std::abs(v - c) < std::abs(prev - c));
    prev = v;
  }
  CHECK(std::abs(prev - c) <= 0.05 * c);
}

TEST_CASE("weighted Dirichlet energy") {
  const double s = 0.5;
  FractionalParams p(1, s);
  QuadratureSpec q = with_tol(1e-4);
  CHECK(weighted_dirichlet_energy(TestFunction::constant(1, 0.0), p, q).value == 0.0);
  CHECK_THROWS_AS(weighted_dirichlet_energy(TestFunction::bump(Vec{0.0, 0.0}, 1.0), FractionalParams(2, s), q), DomainError);
  CHECK_THROWS_AS(weighted_dirichlet_energy(TestFunction::constant(1, 1.0), p, q), DomainError);

  SUBCASE("energy identity with the Gagliardo seminorm of order s/2") {
    double c = closed_constant(ClosedConstantId::ext_energy, p);
    for (auto u : {TestFunction::bump(Vec{0.0}, 1.0), TestFunction::gaussian(Vec{0.2}, 0.5)}) {
      Estimate e = weighted_dirichlet_energy(u, p, q);
      Estimate g = gagliardo_power(u, SeminormParams(s / 2, 2.0), AllSpaceDomain{}, q);
      CHECK(e.status == Status::ok);
      CHECK(std::abs(e.value - c * g.value) <= 0.02 * e.value);
    }
  }
  SUBCASE("scaling") {
    TestFunction u = TestFunction::bump(Vec{0.3}, 1.0);
    Estimate base = weighted_dirichlet_energy(u, p, q);
    for (double lambda : {0.5, 2.0}) {
      Estimate e = weighted_dirichlet_energy(u.rescaled(lambda, Vec{0.0}), p, q);
      double expect = std::pow(lambda, s - 1.0) * base.value;
      CHECK(std::abs(e.value - expect) <= e.error_bound + std::pow(lambda, s - 1.0) * base.error_bound);
    }
  }
}

TEST_CASE("phi at a cone vertex uses homogeneity") {
  const QuadratureSpec q = with_tol(1e-5);
  for (double s : {0.3, 0.5, 0.7}) {
    FractionalParams p(2, s);
    Region E = Region::half_space(Vec{0.6, 0.8}, 0.0);
    Estimate f = phi(E, boundary_probe(E, {"origin", {}}), 2.0, p, q, EnergyDensity::convolution);
    CHECK(f.value == doctest::Approx(closed_constant(ClosedConstantId::phi_half, p)).epsilon(1e-5));
  }
  FractionalParams p(2, 0.5);
  Region C = Region::cross_cone_2d(Vec{0.3, -0.2}, 0.4);
  BoundaryProbe v = boundary_probe(C, {"vertex", {}});
  Estimate a = phi(C, v, 0.5, p, with_tol(1e-3));
  Estimate b = phi(C.complement(), v, 3.0, p, with_tol(1e-3));
  CHECK(a.ok());
  CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound + 1e-9);
  CHECK(a.value > closed_constant(ClosedConstantId::phi_half, p));
}
