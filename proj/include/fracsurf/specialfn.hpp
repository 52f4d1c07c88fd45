#pragma once

#include <array>
#include <limits>

namespace fracsurf {

// Ambient dimension n and fractional order s in (0,1).
struct FractionalParams {
  int n = 1;
  double s = 0.5;

  FractionalParams() = default;
  FractionalParams(int n_, double s_);  // validates
};

enum class ClosedConstantId {
  poisson_a,
  tilde_a,
  phi_half,
  ext_energy,
  radial_profile,
  sine_power,
  slice_kernel,
  h_infinity,
};

const char* to_string(ClosedConstantId id);
ClosedConstantId closed_constant_from_string(const char* name);

double gamma_fn(double x);
double log_gamma(double x);

// Volume of the unit ball in R^k (k >= 0) and area of the unit sphere S^{k-1}.
double unit_ball_volume(int k);
double sphere_area(int k);

double closed_constant(ClosedConstantId id, const FractionalParams& params);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// h(tau) = int_0^tau (1+t^2)^{-(1+s)/2} dt; tau may be +infinity.
double h_profile(double tau, double s);

// Complete and incomplete Beta via boost; B(x; a, b) is not normalized.
double beta_fn(double a, double b);
double incomplete_beta(double a, double b, double x);

// M(T) = int_0^T t^{m-1} (1+t^2)^{-(m+q)/2} dt = B(T^2/(1+T^2); m/2, q/2)/2,
// tabulated with Chebyshev expansions so that evaluation costs one pow call.
// Requires m > 0, q > 0. T may be +infinity.
class RadialMoment {
 public:
  RadialMoment(double m, double q);
  double operator()(double T) const;
  double total() const { return total_; }
  // total() - M(T), accurate for large T.
  double tail(double T) const;
  // M(T1) - M(T0) for T0 <= T1 without cancellation in the tails.
  double between(double T0, double T1) const;

 private:
  static constexpr int kTerms = 34;
  double a_, b_, total_;
  std::array<double, kTerms> low_{};   // F(u) = B(u;a,b)/u^a on [0, 1/2]
  std::array<double, kTerms> high_{};  // G(v) = B(v;b,a)/v^b on [0, 1/2]
};

}  // namespace fracsurf
