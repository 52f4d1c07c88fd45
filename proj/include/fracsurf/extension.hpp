#pragma once

#include <vector>

#include "fracsurf/fracperim.hpp"
#include "fracsurf/geometry.hpp"
#include "fracsurf/quadrature.hpp"
#include "fracsurf/specialfn.hpp"

namespace fracsurf {

// X = (base, height) in the upper half-space R^{n+1}_+.
struct UpperHalfPoint {
  Vec base;
  double height;

  UpperHalfPoint(Vec base, double height);  // requires height > 0
};

struct EnergyBall {
  Vec center_base;
  double radius;

  EnergyBall(Vec center_base, double radius);  // requires radius > 0
};

// P_{s/2}(X,y) = a(n,s) h^s / (|x-y|^2 + h^2)^{(n+s)/2}.
double poisson_kernel(const UpperHalfPoint& X, const Vec& y, const FractionalParams& params);

// int_{R^n} P_{s/2}(X,y) dy by generic quadrature (equals 1).
Estimate poisson_mass(const UpperHalfPoint& X, const FractionalParams& params, const QuadratureSpec& spec);

// U_E(X) = int P_{s/2}(X,y) (chi_{E^c} - chi_E)(y) dy.
Estimate extend(const Region& E, const UpperHalfPoint& X, const FractionalParams& params, const QuadratureSpec& spec);

// Components d/dx_1 .. d/dx_n, d/dh of U_E at X, from the differentiated kernel.
std::vector<Estimate> extend_gradient(const Region& E, const UpperHalfPoint& X, const FractionalParams& params,
                                      const QuadratureSpec& spec);

// U for E = {x_n > 0}: -tilde_a h_profile(x_n / h).
double halfspace_extension(const UpperHalfPoint& X, double s);

// Gradient of halfspace_extension (n+1 components).
std::vector<double> halfspace_extension_gradient(const UpperHalfPoint& X, double s);

enum class EnergyDensity {
  automatic,    // closed form for half-spaces, convolution otherwise
  closed_form,  // half-spaces only
  convolution,
};

// Phi_{E,x}(R) = R^{-(n-s)} int_{B_R^+((x,0))} y^{1-s} |grad U_E|^2.
Estimate phi(const Region& E, const BoundaryProbe& probe, double R, const FractionalParams& params,
             const QuadratureSpec& spec, EnergyDensity density = EnergyDensity::automatic);

// int_{R^{n+1}_+} y^{1-s} |grad U|^2 for the Poisson extension U of u (n = 1).
Estimate weighted_dirichlet_energy(const TestFunction& u, const FractionalParams& params, const QuadratureSpec& spec);

}  // namespace fracsurf
