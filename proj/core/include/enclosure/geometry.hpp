#pragma once

#include <Eigen/Core>

#include <span>
#include <variant>
#include <vector>

namespace enclosure {

using Vec2 = Eigen::Vector2d;

inline constexpr double kUnitTolerance = 1e-12;

/// Rotates a unit vector by +90 degrees. Throws InvalidDirection if
/// |theta| differs from one by more than kUnitTolerance.
Vec2 perp(const Vec2& theta);

/// A probing direction and its +90 degree companion.
class DirectionFrame {
public:
  /// Validates that theta is a unit vector (kUnitTolerance).
  explicit DirectionFrame(const Vec2& theta);

  /// Direction (cos angle, sin angle).
  static DirectionFrame from_angle(double angle);

  const Vec2& theta() const noexcept { return theta_; }
  const Vec2& theta_perp() const noexcept { return theta_perp_; }

private:
  Vec2 theta_;
  Vec2 theta_perp_;
};

struct Disk {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
};

struct AxisEllipse {
  Vec2 center{0.0, 0.0};
  double semi_a = 0.0;  // along x
  double semi_b = 0.0;  // along y
};

/// Strictly convex polygon, vertices counterclockwise.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
};

using Shape = std::variant<Disk, AxisEllipse, ConvexPolygon>;

/// Throws InvalidShape on nonpositive radii or a polygon that is not
/// strictly convex and counterclockwise.
void validate(const Shape& shape);

/// Open-set membership.
bool contains(const Shape& shape, const Vec2& x);

/// sup over the closed shape of x.theta.
double support_function(const Shape& shape, const Vec2& theta);

/// Support function of a union of shapes (max over members). Requires a
/// nonempty list.
double support_function(std::span<const Shape> shapes, const Vec2& theta);

/// h(theta) + h(-theta).
double width(const Shape& shape, const Vec2& theta);

/// max over x in the closed shape of |x|.
double max_norm(const Shape& shape);

/// Membership in the slab {x in D : h_D(theta) - delta < x.theta <= h_D(theta)}.
/// Throws InvalidParameter when delta <= 0.
bool slab_contains(const Shape& shape, const DirectionFrame& frame, double delta,
                   const Vec2& x);
bool slab_contains(std::span<const Shape> shapes, const DirectionFrame& frame,
                   double delta, const Vec2& x);

/// Point at parameter s in [0,1) along the boundary (counterclockwise).
/// Used for sampling-based checks and reporting.
Vec2 boundary_point(const Shape& shape, double s);

struct SupportSample {
  DirectionFrame frame;
  double h;
};

/// Boundary of the intersection of half-planes {x : x.theta <= h}.
/// Throws DegenerateHull when fewer than three directions are given, the
/// directions leave an angular gap of pi or more (unbounded intersection),
/// or the intersection is empty.
ConvexPolygon hull_from_support(std::span<const SupportSample> samples);

/// Hausdorff distance between two convex shapes, evaluated as
/// max |h_a - h_b| over n uniformly spaced directions.
double hausdorff_convex(const Shape& a, const Shape& b, int n_directions = 4096);

struct UnitDisk {};

struct Rectangle {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

using Domain = std::variant<UnitDisk, Rectangle>;

void validate(const Domain& domain);
double diameter(const Domain& domain);
double support_function(const Domain& domain, const Vec2& theta);
bool contains(const Domain& domain, const Vec2& x);

/// Distance from the closed shape to the domain boundary (negative when the
/// shape leaves the domain).
double boundary_distance(const Domain& domain, const Shape& shape);

/// Minimum inclusion-to-boundary distance, as a fraction of diam(domain).
inline constexpr double kInclusionMarginFraction = 0.1;

/// Throws InvalidShape if the shape is closer to the boundary than
/// kInclusionMarginFraction * diameter(domain).
void check_margin(const Domain& domain, const Shape& shape);

}  // namespace enclosure
