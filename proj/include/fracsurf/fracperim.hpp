#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fracsurf/geometry.hpp"
#include "fracsurf/quadrature.hpp"
#include "fracsurf/specialfn.hpp"

namespace fracsurf {

// ---------------------------------------------------------------- test functions

class TestFunction;

namespace fn {
struct Constant {
  double c;
};
struct Bump {  // height * exp(1 - 1/(1 - |x-c|^2/r^2)) on B_r(c)
  Vec center;
  double radius, height;
};
struct Gaussian {  // exp(-|x-c|^2/w^2)
  Vec center;
  double width;
};
struct Indicator {
  Region region;
};
struct RadialPower {  // |x|^exponent
  double exponent;
};
struct Affine {  // coeffs . x + offset
  Vec coeffs;
  double offset;
};
struct Sampled {  // piecewise linear on a uniform grid over [lo, hi], zero outside (n = 1)
  double lo, hi;
  std::vector<double> values;
};
struct Custom {
  std::function<double(const Vec&)> f;
  double sup;
  std::optional<Window> support;
  std::string name;
};
struct Rescaled {  // x -> u(scale x + translate)
  std::shared_ptr<const TestFunction> child;
  double scale;
  Vec translate;
};
struct Kelvin {  // u on B_1, u(x/|x|^2) outside
  std::shared_ptr<const TestFunction> child;
};
}  // namespace fn

using FunctionDescriptor = std::variant<fn::Constant, fn::Bump, fn::Gaussian, fn::Indicator, fn::RadialPower,
                                        fn::Affine, fn::Sampled, fn::Custom, fn::Rescaled, fn::Kelvin>;

// Immutable function on R^n used as data for seminorms, extensions and interpolation checks.
class TestFunction {
 public:
  static TestFunction constant(int n, double c);
  static TestFunction bump(Vec center, double radius, double height = 1.0);
  static TestFunction gaussian(Vec center, double width);
  static TestFunction indicator(Region region);
  static TestFunction radial_power(int n, double exponent);
  static TestFunction affine(Vec coeffs, double offset = 0.0);
  static TestFunction sampled(double lo, double hi, std::vector<double> values);
  static TestFunction custom(int n, std::function<double(const Vec&)> f, double sup,
                             std::optional<Window> support = std::nullopt, std::string name = "custom");

  TestFunction rescaled(double scale, const Vec& translate) const;

  int dim() const { return dim_; }
  const FunctionDescriptor& descriptor() const { return *desc_; }
  double operator()(const Vec& x) const;
  // Analytic gradient where available.
  std::optional<Vec> gradient(const Vec& x) const;
  // Exact sup over R^n (infinite for unbounded variants).
  double sup_norm() const;
  // Sup over a closed ball (exact or a tight upper bound).
  double sup_over(const Window& ball) const;
  // Ball containing the support. Gaussians report the ball outside which |u| < 1e-18.
  std::optional<Window> support() const;
  bool is_constant() const;
  const Region* indicator_region() const;
  std::string describe() const;

 private:
  TestFunction(int dim, FunctionDescriptor d) : dim_(dim), desc_(std::make_shared<const FunctionDescriptor>(std::move(d))) {}
  friend TestFunction kelvin_extend(const TestFunction& u);
  int dim_ = 0;
  std::shared_ptr<const FunctionDescriptor> desc_;
};

// Eu = u on B_1 and u(x/|x|^2) outside.
TestFunction kelvin_extend(const TestFunction& u);

// ---------------------------------------------------------------- parameters

struct SeminormParams {
  double alpha;
  double p;

  SeminormParams(double alpha, double p);  // validates 0 < alpha < 1, 1 <= p < inf
  double p_star(int n) const;              // np/(n - alpha p); infinite when alpha p >= n
};

struct InterpolationParams {
  double epsilon;
  double R;
  double s;

  InterpolationParams(double epsilon, double R, double s);  // validates 0 < epsilon < 3^{-1/s}, R > 0
  double rho() const { return std::pow(epsilon, -1.0 / s); }
  double delta() const { return 1.0 + rho(); }
};

// ---------------------------------------------------------------- perimeters and curvature

enum class PerimeterForm { three_term, q_form };
const char* to_string(PerimeterForm f);

// Per_s(E; window).
Estimate per_s(const Region& E, const Window& window, const FractionalParams& params, const QuadratureSpec& spec,
               PerimeterForm form = PerimeterForm::three_term);

// H_{s,E}(x) as a principal value at a boundary probe.
Estimate mean_curvature_s(const Region& E, const BoundaryProbe& probe, const FractionalParams& params,
                          const QuadratureSpec& spec);

// ---------------------------------------------------------------- seminorms

struct AllSpaceDomain {};
using SeminormDomain = std::variant<Window, AllSpaceDomain>;

// [u]^p = int int |u(x)-u(y)|^p |x-y|^{-n-alpha p} over domain x domain.
Estimate gagliardo_power(const TestFunction& u, const SeminormParams& sp, const SeminormDomain& domain,
                         const QuadratureSpec& spec);
// p-th root of gagliardo_power.
Estimate gagliardo_seminorm(const TestFunction& u, const SeminormParams& sp, const SeminormDomain& domain,
                            const QuadratureSpec& spec);

namespace piece {
struct Circle {  // in R^2
  Vec center;
  double radius;
};
struct Segment {  // in R^2
  Vec a, b;
};
struct Sphere {  // in R^3
  Vec center;
  double radius;
};
}  // namespace piece
using BoundaryPiece = std::variant<piece::Circle, piece::Segment, piece::Sphere>;

// Seminorm power with respect to surface measure; kernel |x-y|^{-(d + alpha p)} with d the piece dimension.
Estimate boundary_gagliardo_power(const TestFunction& u, const SeminormParams& sp, const BoundaryPiece& boundary,
                                  const QuadratureSpec& spec);
Estimate boundary_gagliardo(const TestFunction& u, const SeminormParams& sp, const BoundaryPiece& boundary,
                            const QuadratureSpec& spec);

// int int_{Q(B_R(center))} |u(x)-u(y)| |x-y|^{-n-s}.
Estimate interpolation_lhs(const TestFunction& u, double R, const FractionalParams& params, const QuadratureSpec& spec,
                           std::optional<Vec> center = std::nullopt);

// |grad u|(ball): classical perimeter for indicators, int |grad u| for functions with a gradient.
Estimate total_variation(const TestFunction& u, const Window& ball, const QuadratureSpec& spec);

// (x,y) in Q(B_R(0)) iff x or y lies in B_R.
bool in_q_set(const Vec& x, const Vec& y, double R);

}  // namespace fracsurf
