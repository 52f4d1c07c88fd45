#pragma once

#include <functional>
#include <optional>
#include <span>

#include "fracsurf/geometry.hpp"
#include "fracsurf/quadrature.hpp"

namespace fracsurf {

// Integrals over the space of lines, based on
//   int int f(x,y) dx dy = 1/2 int_{S^{n-1}} int_{theta^perp} int int f(p+t theta, p+u theta) |t-u|^{n-1} dt du dp dtheta.
// A line is reported as (origin, unit direction); for n = 1 the only line is R.

// Line functional with K components (values and propagated errors).
using LineFunctionK =
    std::function<void(const Vec& origin, const Vec& dir, std::span<double> val, std::span<double> err, SampleMeta& meta)>;
using LineFunction = std::function<double(const Vec& origin, const Vec& dir)>;

// int_{half sphere} dtheta int_{theta^perp, |p| < radius} dp F(center + p, theta).
// `features` supplies boundary geometry used to place breakpoints at tangencies.
MultiEstimate integrate_lines_k(int K, const Window& window, const LineFunctionK& F, const RegionFeatures& features,
                                const QuadratureSpec& spec, int depth = 0);
Estimate integrate_lines(const Window& window, const LineFunction& F, const RegionFeatures& features,
                         const QuadratureSpec& spec, int depth = 0);

// int_{half sphere} F(x, theta) dtheta over lines through x. Directions are measured from
// `axis`; the directions perpendicular to it sit at the ends of the parameter range, where
// tangent-line singularities are absorbed by endpoint clustering. With `joint` the components are
// treated as one vector for the tolerance test.
MultiEstimate integrate_lines_through_k(int K, const Vec& x, const Vec& axis, const LineFunctionK& F,
                                        const RegionFeatures& features, const QuadratureSpec& spec, int depth = 0,
                                        bool joint = false);
Estimate integrate_lines_through(const Vec& x, const Vec& axis, const LineFunction& F, const RegionFeatures& features,
                                 const QuadratureSpec& spec, int depth = 0);

// Points where boundary pieces cross each other or the window circle (n = 2), plus cone apexes.
std::vector<Vec> pivot_points(const RegionFeatures& features, const std::optional<Window>& window);

// ---------------------------------------------------------------- one-line functionals

// sum_{I in A, J in B} int_I int_J |t-u|^{-1-s} du dt in closed form.
// Throws DivergenceError when A and B overlap or both reach infinity on opposite sides.
double pair_interaction(const IntervalSet& A, const IntervalSet& B, double s);

// int_0^inf r^{-1-s} |{t : (t in W or t+r in W), chi_E(t) != chi_E(t+r)}| dr; the measure is
// piecewise linear in r, so the integral is summed exactly segment by segment.
double q_form_line(const IntervalSet& E, const Interval& W, double s);

// Principal value of int_R (chi_{E^c} - chi_E)(t) |t|^{-1-s} dt split into the finite part and the
// coefficient of the divergent eps^{-s}/s term (zero when the symmetric limit exists).
struct LinePV {
  double finite_part = 0.0;
  double divergent = 0.0;
};
LinePV pv_line(IntervalSet E, double s, double snap);

}  // namespace fracsurf

namespace fracsurf {

// Seeded Monte Carlo counterparts of integrate_lines / integrate_lines_through.
Estimate monte_carlo_lines(const Window& window, const LineFunction& F, const QuadratureSpec& spec);
Estimate monte_carlo_lines_through(const Vec& x, const Vec& axis, const LineFunction& F, const QuadratureSpec& spec);

}  // namespace fracsurf
