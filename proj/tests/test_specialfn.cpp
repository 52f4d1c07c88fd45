#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fracsurf/errors.hpp"
#include "fracsurf/specialfn.hpp"
#include "oracles.hpp"

using namespace fracsurf;

TEST_CASE("gamma_fn matches the Stirling oracle and simple values") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(gamma_fn(0.25) == doctest::Approx(3.6256099082219083).epsilon(1e-13));
  for (double x = 1e-3; x <= 50.0; x *= 1.37) {
    double ref = static_cast<double>(oracle::gamma_ld(x));
    CHECK(std::abs(gamma_fn(x) / ref - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
  CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
}

TEST_CASE("gamma_fn satisfies the recurrence on a grid") {
  for (int i = 0; i < 100; ++i) {
    double x = 1e-3 + i * (49.0 / 99.0);
    CHECK(std::abs(gamma_fn(x + 1) / (x * gamma_fn(x)) - 1.0) < 1e-12);
  }
}

TEST_CASE("fractional params reject endpoints") {
  CHECK_THROWS_AS(FractionalParams(1, 0.0), DomainError);
  CHECK_THROWS_AS(FractionalParams(1, 1.0), DomainError);
  CHECK_THROWS_AS(FractionalParams(0, 0.5), DomainError);
  CHECK_NOTHROW(FractionalParams(3, 0.999));
}

TEST_CASE("closed constants reference values") {
  CHECK(closed_constant(ClosedConstantId::phi_half, FractionalParams(2, 0.5)) == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
  // Frozen from 30-digit quadrature of the defining integrals.
  CHECK(closed_constant(ClosedConstantId::poisson_a, FractionalParams(1, 0.5)) == doctest::Approx(0.190689940875453297).epsilon(1e-13));
  CHECK(closed_constant(ClosedConstantId::h_infinity, FractionalParams(1, 0.5)) == doctest::Approx(2.62205755429211980).epsilon(1e-13));
  CHECK(closed_constant(ClosedConstantId::tilde_a, FractionalParams(1, 0.5)) == doctest::Approx(0.381379881750906596).epsilon(1e-13));
  // Rounded reference values, good to four digits.
  CHECK(closed_constant(ClosedConstantId::poisson_a, FractionalParams(1, 0.5)) == doctest::Approx(0.190694).epsilon(1e-4));
  CHECK(closed_constant(ClosedConstantId::h_infinity, FractionalParams(1, 0.5)) == doctest::Approx(2.62196).epsilon(1e-4));
}

TEST_CASE("closed constants against direct Gamma products") {
  for (int n = 1; n <= 10; ++n)
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      FractionalParams p(n, s);
      const double pi = std::numbers::pi;
      auto G = [](double x) { return static_cast<double>(oracle::gamma_ld(x)); };
      CHECK(closed_constant(ClosedConstantId::poisson_a, p) ==
            doctest::Approx(G((n + s) / 2) / (std::pow(pi, n / 2.0) * G(s / 2))).epsilon(1e-12));
      CHECK(closed_constant(ClosedConstantId::ext_energy, p) ==
            doctest::Approx(s * G((n + s) / 2) / (2 * std::pow(pi, n / 2.0) * G(s / 2))).epsilon(1e-12));
      CHECK(closed_constant(ClosedConstantId::slice_kernel, p) ==
            doctest::Approx(std::pow(pi, (n - 1) / 2.0) * G((s + 1) / 2) / G((n + s) / 2)).epsilon(1e-12));
      CHECK(closed_constant(ClosedConstantId::radial_profile, p) ==
            doctest::Approx(G((n + 1) / 2.0) * G((1 - s) / 2) / (2 * G((n - s) / 2 + 1))).epsilon(1e-12));
    }
}

TEST_CASE("tilde_a times h_infinity is one") {
  for (double s = 0.05; s < 1.0; s += 0.05) {
    FractionalParams p(1, s);
    CHECK(closed_constant(ClosedConstantId::tilde_a, p) * closed_constant(ClosedConstantId::h_infinity, p) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("phi_half assembles from its factors") {
  for (int n = 1; n <= 6; ++n)
    for (double s : {0.2, 0.5, 0.8}) {
      FractionalParams p(n, s);
      double ta = closed_constant(ClosedConstantId::tilde_a, p);
      double assembled = ta * ta * unit_ball_volume(n - 1) * closed_constant(ClosedConstantId::radial_profile, p) *
                         closed_constant(ClosedConstantId::sine_power, p);
      CHECK(closed_constant(ClosedConstantId::phi_half, p) == doctest::Approx(assembled).epsilon(1e-13));
    }
}

TEST_CASE("sine_power matches the integral of sin^{s-1} over [0, pi]") {
  for (double s : {0.3, 0.5, 0.7}) {
    FractionalParams p(2, s);
    // Substitute phi = (pi/2) w^{1/s} on each half to remove the endpoint singularity.
    auto g = [s](double w) {
      double phi = 0.5 * std::numbers::pi * std::pow(w, 1.0 / s);
      double dphi = 0.5 * std::numbers::pi / s * std::pow(w, 1.0 / s - 1.0);
      return std::pow(std::sin(phi), s - 1) * dphi;
    };
    double sp = 2 * oracle::gauss_legendre(g, 0.0, 1.0, 400);
    CHECK(closed_constant(ClosedConstantId::sine_power, p) == doctest::Approx(sp).epsilon(1e-9));
  }
}

TEST_CASE("h_profile") {
  CHECK(h_profile(0.0, 0.3) == 0.0);
  CHECK(h_profile(kInfinity, 0.5) == doctest::Approx(2.62205755429211980).epsilon(1e-13));
  CHECK(h_profile(1.0, 0.5) == doctest::Approx(0.830896216180937471).epsilon(1e-13));
  double ref = oracle::gauss_legendre([](double t) { return std::pow(1 + t * t, -0.75); }, 0.0, 1.0, 50);
  CHECK(h_profile(1.0, 0.5) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(h_profile(1.0, 0.5) == doctest::Approx(0.830).epsilon(1e-3));
  double prev = 0.0;
  for (double t = 0.01; t < 1e6; t *= 1.5) {
    double h = h_profile(t, 0.4);
    CHECK(h > prev);
    prev = h;
  }
  CHECK(prev < h_profile(kInfinity, 0.4));
  CHECK_THROWS_AS(h_profile(-1.0, 0.5), DomainError);
}

TEST_CASE("RadialMoment tabulation agrees with the incomplete Beta function") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logT(-6, 6);
  for (double m : {1.0, 2.0, 3.0, 4.0})
    for (double q : {0.3, 0.5, 1.3, 2.5}) {
      RadialMoment M(m, q);
      CHECK(M.total() == doctest::Approx(0.5 * beta_fn(m / 2, q / 2)).epsilon(1e-14));
      for (int i = 0; i < 200; ++i) {
        double T = std::pow(10.0, logT(rng));
        double u = T * T / (1 + T * T);
        double ref = T <= 1 ? 0.5 * incomplete_beta(m / 2, q / 2, u)
                            : M.total() - 0.5 * incomplete_beta(q / 2, m / 2, 1 / (1 + T * T));
        CHECK(std::abs(M(T) - ref) <= 2e-14 * M.total());
      }
    }
}

TEST_CASE("RadialMoment matches direct quadrature of its integrand") {
  RadialMoment M(2.0, 0.5);
  double ref = oracle::gauss_legendre([](double t) { return t * std::pow(1 + t * t, -1.25); }, 0.0, 3.0, 200);
  CHECK(M(3.0) == doctest::Approx(ref).epsilon(1e-12));
}
