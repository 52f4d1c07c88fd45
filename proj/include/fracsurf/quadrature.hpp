#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fracsurf/geometry.hpp"
#include "fracsurf/specialfn.hpp"
#include "fracsurf/vec.hpp"

namespace fracsurf {

enum class Method { adaptive, montecarlo };
enum class BoundKind { deterministic_bound, statistical_3sigma };
enum class Status { ok, budget_exhausted, divergent, non_convergent };

const char* to_string(Method m);
const char* to_string(BoundKind k);
const char* to_string(Status s);

struct QuadratureSpec {
  Method method = Method::adaptive;
  double rel_tol = 1e-4;
  double abs_tol = 1e-10;
  int max_subdivisions = 400;
  double truncation_radius = 64.0;
  double pv_epsilon = 0.25;
  std::uint64_t sample_budget = 10'000'000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Estimate {
  double value = 0.0;
  double error_bound = 0.0;
  BoundKind kind = BoundKind::deterministic_bound;
  std::uint64_t work = 0;
  Status status = Status::ok;

  bool ok() const { return status == Status::ok; }
};

Status worse(Status a, Status b);
// Value NaN, error infinite, with the given status.
Estimate flagged_estimate(Status status);
Estimate operator+(const Estimate& a, const Estimate& b);
Estimate operator-(const Estimate& a, const Estimate& b);
Estimate operator*(double c, const Estimate& e);
// Propagates errors through f(e) = e^p for e >= 0.
Estimate power(const Estimate& e, double p);
// Quotient a/b with first-order error propagation (b bounded away from zero).
Estimate ratio(const Estimate& a, const Estimate& b);

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

// ---------------------------------------------------------------- 1-D engine

struct Options1D {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_subdivisions = 400;
  std::vector<double> breakpoints;  // kinks or jumps inside (a,b)
  std::vector<double> singular;     // integrable singular points among endpoints/breakpoints
  bool all_singular = false;        // cluster nodes toward every segment endpoint
  double scale = 1.0;               // length scale for infinite ranges
  bool parallel = true;             // allow node evaluation through parallel_for
  bool joint_tolerance = false;     // components share one scale, max_k |value_k| (vector-valued integrands)
};

// Meta information an integrand can report alongside its value.
struct SampleMeta {
  std::uint64_t work = 1;
  Status status = Status::ok;
};

// Integrand with K components; err holds propagated errors of nested estimates.
using MultiIntegrand = std::function<void(double x, std::span<double> val, std::span<double> err, SampleMeta& meta)>;

struct MultiEstimate {
  std::vector<double> value, error;
  std::uint64_t work = 0;
  Status status = Status::ok;
  Estimate component(int k) const;
};

// Global adaptive Gauss-Kronrod (10/21) with double-exponential maps on
// infinite ranges and around declared singular points.
MultiEstimate integrate_1d_multi(int K, const MultiIntegrand& f, double a, double b, const Options1D& opt);
Estimate integrate_1d(const std::function<double(double)>& f, double a, double b, const Options1D& opt);
Estimate integrate_1d_nested(const std::function<Estimate(double)>& f, double a, double b, const Options1D& opt);

// Options for a nested level derived from a spec (tolerance split between levels).
Options1D options_from(const QuadratureSpec& spec, int depth = 0);

// ---------------------------------------------------------------- n-D integration

struct BoxDomain {
  Vec lo, hi;
};
struct AllSpace {
  int n;
};
struct ClippedBox {
  BoxDomain box;
  Region region;
};
using Domain = std::variant<Window, BoxDomain, AllSpace, ClippedBox>;

struct Integrand {
  std::function<double(const Vec&)> f;
  std::optional<Vec> singular_point;  // integrable point singularity declared to the engine
};

Estimate integrate(const Integrand& f, const Domain& domain, const QuadratureSpec& spec);

// Seeded Monte Carlo mean of f over `count` samples produced by draw(u01, out).
// Bit-identical for a fixed seed regardless of thread count.
Estimate monte_carlo(const std::function<double(const double* u, int dim)>& f, int dim, double measure,
                     const QuadratureSpec& spec);

// Integral over the unit sphere S^{n-1} of f(theta); n = 1 sums the two points.
Estimate integrate_sphere(int n, const std::function<Estimate(const Vec&)>& f, const QuadratureSpec& spec, int depth = 0);

// |S^{n-1}| rho^{-s}/s = int_{|y|>rho} |y|^{-n-s} dy.
double tail_integral(double rho, const FractionalParams& params);

// ---------------------------------------------------------------- kernel integrals

// I_s(A,B) = int_A int_B |x-y|^{-n-s}, optionally with both sets clipped to a window.
Estimate interaction_integral(const Region& A, const Region& B, const std::optional<Window>& window,
                              const FractionalParams& params, const QuadratureSpec& spec);

// Principal value of int (chi_{E^c} - chi_E)(y) |x-y|^{-n-s} dy at a boundary probe x.
Estimate pv_kernel_integral(const Region& E, const BoundaryProbe& probe, const FractionalParams& params,
                            const QuadratureSpec& spec);

}  // namespace fracsurf
