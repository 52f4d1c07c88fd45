#include "fracsurf/specialfn.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "fracsurf/errors.hpp"

namespace fracsurf {

namespace {

constexpr double kPi = std::numbers::pi;

double chebyshev_eval(const std::array<double, 34>& coef, double x) {
  // Clenshaw recurrence for sum' c_k T_k(x).
  double b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(coef.size()) - 1; k >= 1; --k) {
    double t = 2.0 * x * b1 - b2 + coef[k];
    b2 = b1;
    b1 = t;
  }
  return x * b1 - b2 + 0.5 * coef[0];
}

template <class F>
std::array<double, 34> chebyshev_fit(F f) {
  constexpr int N = 34;
  std::array<double, N> fx{};
  for (int j = 0; j < N; ++j) fx[j] = f(std::cos(kPi * (j + 0.5) / N));
  std::array<double, N> coef{};
  for (int k = 0; k < N; ++k) {
    double sum = 0.0;
    for (int j = 0; j < N; ++j) sum += fx[j] * std::cos(kPi * k * (j + 0.5) / N);
    coef[k] = 2.0 * sum / N;
  }
  return coef;
}

}  // namespace

FractionalParams::FractionalParams(int n_, double s_) : n(n_), s(s_) {
  if (n < 1) throw DomainError("dimension n must be >= 1, got " + std::to_string(n));
  if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional order s must lie in (0,1), got " + std::to_string(s));
}

const char* to_string(ClosedConstantId id) {
  switch (id) {
    case ClosedConstantId::poisson_a: return "poisson_a";
    case ClosedConstantId::tilde_a: return "tilde_a";
    case ClosedConstantId::phi_half: return "phi_half";
    case ClosedConstantId::ext_energy: return "ext_energy";
    case ClosedConstantId::radial_profile: return "radial_profile";
    case ClosedConstantId::sine_power: return "sine_power";
    case ClosedConstantId::slice_kernel: return "slice_kernel";
    case ClosedConstantId::h_infinity: return "h_infinity";
  }
  return "unknown";
}

ClosedConstantId closed_constant_from_string(const char* name) {
  for (auto id : {ClosedConstantId::poisson_a, ClosedConstantId::tilde_a, ClosedConstantId::phi_half,
                  ClosedConstantId::ext_energy, ClosedConstantId::radial_profile, ClosedConstantId::sine_power,
                  ClosedConstantId::slice_kernel, ClosedConstantId::h_infinity})
    if (std::strcmp(name, to_string(id)) == 0) return id;
  throw DomainError(std::string("unknown closed constant: ") + name);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn requires a positive argument, got " + std::to_string(x));
  return std::tgamma(x);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma requires a positive argument, got " + std::to_string(x));
  return std::lgamma(x);
}

double unit_ball_volume(int k) {
  if (k < 0) throw DomainError("unit_ball_volume requires k >= 0");
  return std::exp(0.5 * k * std::log(kPi) - std::lgamma(0.5 * k + 1.0));
}

double sphere_area(int k) {
  if (k < 1) throw DomainError("sphere_area requires k >= 1");
  return k * unit_ball_volume(k);
}

double closed_constant(ClosedConstantId id, const FractionalParams& p) {
  const double n = p.n, s = p.s;
  const double lpi = std::log(kPi);
  double lg = 0.0;
  switch (id) {
    case ClosedConstantId::poisson_a:
      lg = log_gamma((n + s) / 2) - 0.5 * n * lpi - log_gamma(s / 2);
      break;
    case ClosedConstantId::tilde_a:
      lg = std::log(2.0) + log_gamma((s + 1) / 2) - 0.5 * lpi - log_gamma(s / 2);
      break;
    case ClosedConstantId::phi_half:
      lg = std::log(2.0) + (0.5 * n - 1) * lpi + log_gamma((s + 1) / 2) + log_gamma((1 - s) / 2) -
           log_gamma(s / 2) - log_gamma((n - s) / 2 + 1);
      break;
    case ClosedConstantId::ext_energy:
      lg = std::log(s / 2) + log_gamma((n + s) / 2) - 0.5 * n * lpi - log_gamma(s / 2);
      break;
    case ClosedConstantId::radial_profile:
      lg = log_gamma((n + 1) / 2) + log_gamma((1 - s) / 2) - std::log(2.0) - log_gamma((n - s) / 2 + 1);
      break;
    case ClosedConstantId::sine_power:
      lg = 0.5 * lpi + log_gamma(s / 2) - log_gamma((s + 1) / 2);
      break;
    case ClosedConstantId::slice_kernel:
      lg = 0.5 * (n - 1) * lpi + log_gamma((s + 1) / 2) - log_gamma((n + s) / 2);
      break;
    case ClosedConstantId::h_infinity:
      lg = 0.5 * lpi + log_gamma(s / 2) - std::log(2.0) - log_gamma((s + 1) / 2);
      break;
  }
  return std::exp(lg);
}

double beta_fn(double a, double b) { return boost::math::beta(a, b); }

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return beta_fn(a, b);
  return boost::math::beta(a, b, x);
}

double h_profile(double tau, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("h_profile requires s in (0,1)");
  if (std::isnan(tau) || tau < 0.0) throw DomainError("h_profile requires tau >= 0");
  if (std::isinf(tau)) return closed_constant(ClosedConstantId::h_infinity, FractionalParams(1, s));
  if (tau == 0.0) return 0.0;
  double t2 = tau * tau;
  double u = t2 / (1.0 + t2);
  if (u <= 0.5) return 0.5 * incomplete_beta(0.5, s / 2, u);
  // Complementary form keeps accuracy for large tau.
  double v = 1.0 / (1.0 + t2);
  return closed_constant(ClosedConstantId::h_infinity, FractionalParams(1, s)) - 0.5 * incomplete_beta(s / 2, 0.5, v);
}

RadialMoment::RadialMoment(double m, double q) : a_(m / 2), b_(q / 2) {
  if (!(m > 0.0 && q > 0.0)) throw DomainError("RadialMoment requires m > 0 and q > 0");
  total_ = 0.5 * beta_fn(a_, b_);
  auto ratio = [](double a, double b) {
    return [a, b](double x) {
      double u = 0.25 * (x + 1.0);  // [-1,1] -> [0,1/2]
      if (u < 1e-300) return 1.0 / a;
      return boost::math::beta(a, b, u) / std::pow(u, a);
    };
  };
  low_ = chebyshev_fit(ratio(a_, b_));
  high_ = chebyshev_fit(ratio(b_, a_));
}

double RadialMoment::operator()(double T) const {
  if (!(T > 0.0)) return 0.0;
  if (std::isinf(T)) return total_;
  double t2 = T * T;
  if (t2 <= 1.0) {
    double u = t2 / (1.0 + t2);
    return 0.5 * std::pow(u, a_) * chebyshev_eval(low_, 4.0 * u - 1.0);
  }
  double v = 1.0 / (1.0 + t2);
  return total_ - 0.5 * std::pow(v, b_) * chebyshev_eval(high_, 4.0 * v - 1.0);
}

double RadialMoment::tail(double T) const {
  if (!(T > 1.0)) return total_ - (*this)(T);
  if (std::isinf(T)) return 0.0;
  double v = 1.0 / (1.0 + T * T);
  return 0.5 * std::pow(v, b_) * chebyshev_eval(high_, 4.0 * v - 1.0);
}

double RadialMoment::between(double T0, double T1) const {
  if (T0 > 1.0) return tail(T0) - tail(T1);
  return (*this)(T1) - (*this)(T0);
}

}  // namespace fracsurf
