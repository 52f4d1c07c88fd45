#pragma once

#include <boost/container/small_vector.hpp>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fracsurf/vec.hpp"

namespace fracsurf {

// Open interval on a parametrized line; endpoints may be infinite.
struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

// Sorted, pairwise disjoint, nonempty open intervals.
using IntervalSet = boost::container::small_vector<Interval, 6>;

IntervalSet interval_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet interval_intersection(const IntervalSet& a, const IntervalSet& b);
IntervalSet interval_complement(const IntervalSet& a);
IntervalSet interval_difference(const IntervalSet& a, const IntervalSet& b);
IntervalSet interval_shift(const IntervalSet& a, double by);
double interval_length(const IntervalSet& a);
bool interval_contains(const IntervalSet& a, double t);

struct Window {
  Vec center;
  double radius = 1.0;

  Window() = default;
  Window(Vec c, double r);  // validates r > 0
};

struct BoundaryProbe {
  Vec point;
  Vec normal;  // outward; meaningful only when smooth
  bool smooth = true;
};

class Region;

namespace shape {
struct HalfSpace {  // {x : x.normal > offset}
  Vec normal;
  double offset;
};
struct Ball {
  Vec center;
  double radius;
};
struct Slab {  // {x : lower < x.direction < upper}
  Vec direction;
  double lower, upper;
};
struct CrossCone {  // {x : ((x-apex).axis1) ((x-apex).axis2) > 0}, n = 2
  Vec apex, axis1, axis2;
};
struct Empty {};
struct Complement {
  std::shared_ptr<const Region> child;
};
struct Union {
  std::shared_ptr<const Region> left, right;
};
struct Intersection {
  std::shared_ptr<const Region> left, right;
};
}  // namespace shape

using Shape = std::variant<shape::HalfSpace, shape::Ball, shape::Slab, shape::CrossCone, shape::Empty,
                           shape::Complement, shape::Union, shape::Intersection>;

// Immutable analytic set in R^n (1 <= n <= 3) built from primitives and boolean operations.
class Region {
 public:
  static Region half_space(Vec normal, double offset);
  static Region ball(Vec center, double radius);
  static Region slab(Vec direction, double lower, double upper);
  static Region cross_cone_2d(Vec apex = Vec{0.0, 0.0}, double rotation = 0.0);
  static Region empty(int dim);

  Region complement() const;
  friend Region set_union(const Region& a, const Region& b);
  friend Region set_intersection(const Region& a, const Region& b);

  int dim() const { return dim_; }
  const Shape& shape() const { return *shape_; }
  bool is_primitive() const;

  bool contains(const Vec& p) const;
  // Parameters t with origin + t*dir inside the set, computed exactly per primitive.
  // Primitives whose implicit value at origin is within `pin` of zero are treated as passing
  // exactly through origin, so the corresponding endpoint is t = 0.
  IntervalSet line_intervals(const Vec& origin, const Vec& dir, double pin = 0.0) const;
  // Smallest ball containing the set, if bounded (conservative for composites).
  std::optional<Window> bounding_ball() const;
  // Same for the complement.
  std::optional<Window> complement_bounding_ball() const;

  Region transformed(double scale, const Vec& translate) const;
  // Applies p -> Q p with Q orthogonal (rows given), n x n.
  Region rotated(const std::array<Vec, kMaxDim>& rows) const;

  std::string describe() const;

 private:
  Region(int dim, Shape s) : dim_(dim), shape_(std::make_shared<const Shape>(std::move(s))) {}
  int dim_ = 0;
  std::shared_ptr<const Shape> shape_;
};

Region set_union(const Region& a, const Region& b);
Region set_intersection(const Region& a, const Region& b);

// -1 inside, +1 outside; points with |implicit value| < 1e-14 count as outside.
int signed_indicator(const Region& region, const Vec& point);

// (n-1)-dimensional measure of the boundary inside the open window.
double classical_perimeter(const Region& region, const Window& window);

struct BoundarySelector {
  std::string name;            // origin, pole, vertex, upper, angle, offset, axis1, axis2, point
  std::vector<double> values;  // parameters for angle/offset/axis/point selectors
};

BoundaryProbe boundary_probe(const Region& region, const BoundarySelector& selector);

Region transform(const Region& region, double scale, const Vec& translate);

// Geometric features used to place quadrature breakpoints.
struct RegionFeatures {
  std::vector<Window> spheres;  // ball boundaries
  std::vector<Vec> plane_normals;
  std::vector<std::pair<Vec, double>> planes;  // normal, offset (x.normal = offset)
  std::vector<Vec> apexes;
  std::vector<Vec> axes;  // cone boundary line directions
};
RegionFeatures collect_features(const Region& region);
void merge_features(RegionFeatures& into, const RegionFeatures& from);

}  // namespace fracsurf
