#include "enclosure/geometry.hpp"

#include "enclosure/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace enclosure {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

void check_unit(const Vec2& theta) {
  const double n = theta.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
    std::ostringstream os;
    os << "direction (" << theta.x() << ", " << theta.y() << ") is not a unit vector (|theta| = "
       << n << ")";
    raise(ErrorCode::InvalidDirection, os.str());
  }
}

double polygon_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

// Keeps the part of a convex polygon with x.n <= h.
std::vector<Vec2> clip(const std::vector<Vec2>& poly, const Vec2& n, double h) {
  std::vector<Vec2> out;
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    const double dp = p.dot(n) - h;
    const double dq = q.dot(n) - h;
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

// Drops repeated and collinear vertices.
std::vector<Vec2> simplify(std::vector<Vec2> v, double scale) {
  const double tol = 1e-12 * std::max(scale, 1.0);
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const Vec2& prev = v[(i + v.size() - 1) % v.size()];
      const Vec2& cur = v[i];
      const Vec2& next = v[(i + 1) % v.size()];
      const bool duplicate = (cur - prev).norm() <= tol;
      const double len = (next - prev).norm();
      const bool collinear = len > 0.0 && std::abs(cross(cur - prev, next - prev)) <= tol * len;
      if (duplicate || collinear) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return v;
}

double ellipse_max_norm(const AxisEllipse& e) {
  auto f = [&](double t) {
    return (e.center + Vec2(e.semi_a * std::cos(t), e.semi_b * std::sin(t))).squaredNorm();
  };
  constexpr int kScan = 4096;
  int best = 0;
  double best_val = -1.0;
  for (int k = 0; k < kScan; ++k) {
    const double v = f(kTwoPi * k / kScan);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  // golden-section refinement inside the bracketing cells
  double lo = kTwoPi * (best - 1) / kScan;
  double hi = kTwoPi * (best + 1) / kScan;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  for (int it = 0; it < 100; ++it) {
    if (f(c) > f(d)) {
      hi = d;
    } else {
      lo = c;
    }
    c = hi - g * (hi - lo);
    d = lo + g * (hi - lo);
  }
  return std::sqrt(std::max(best_val, f(0.5 * (lo + hi))));
}

}  // namespace

Vec2 perp(const Vec2& theta) {
  check_unit(theta);
  return {-theta.y(), theta.x()};
}

DirectionFrame::DirectionFrame(const Vec2& theta) : theta_(theta), theta_perp_(perp(theta)) {}

DirectionFrame DirectionFrame::from_angle(double angle) {
  return DirectionFrame(Vec2(std::cos(angle), std::sin(angle)));
}

void validate(const Shape& shape) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          if (!(s.radius > 0.0) || !s.center.allFinite())
            raise(ErrorCode::InvalidShape, "disk radius must be > 0");
        } else if constexpr (std::is_same_v<T, AxisEllipse>) {
          if (!(s.semi_a > 0.0) || !(s.semi_b > 0.0) || !s.center.allFinite())
            raise(ErrorCode::InvalidShape, "ellipse semi-axes must be > 0");
        } else {
          const auto& v = s.vertices;
          if (v.size() < 3) raise(ErrorCode::InvalidShape, "polygon needs at least 3 vertices");
          double turning = 0.0;
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].allFinite()) raise(ErrorCode::InvalidShape, "polygon vertex not finite");
            const Vec2 e0 = v[(i + 1) % v.size()] - v[i];
            const Vec2 e1 = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
            const double c = cross(e0, e1);
            if (!(c > 0.0))
              raise(ErrorCode::InvalidShape,
                    "polygon vertices must be strictly convex and counterclockwise");
            turning += std::atan2(c, e0.dot(e1));
          }
          if (std::abs(turning - kTwoPi) > 1e-9)
            raise(ErrorCode::InvalidShape, "polygon boundary winds more than once");
        }
      },
      shape);
}

bool contains(const Shape& shape, const Vec2& x) {
  return std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return (x - s.center).squaredNorm() < s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, AxisEllipse>) {
          const double u = (x.x() - s.center.x()) / s.semi_a;
          const double w = (x.y() - s.center.y()) / s.semi_b;
          return u * u + w * w < 1.0;
        } else {
          const auto& v = s.vertices;
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(cross(v[(i + 1) % v.size()] - v[i], x - v[i]) > 0.0)) return false;
          }
          return true;
        }
      },
      shape);
}

double support_function(const Shape& shape, const Vec2& theta) {
  return std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return s.center.dot(theta) + s.radius * theta.norm();
        } else if constexpr (std::is_same_v<T, AxisEllipse>) {
          const double ax = s.semi_a * theta.x();
          const double by = s.semi_b * theta.y();
          return s.center.dot(theta) + std::sqrt(ax * ax + by * by);
        } else {
          double h = -std::numeric_limits<double>::infinity();
          for (const auto& p : s.vertices) h = std::max(h, p.dot(theta));
          return h;
        }
      },
      shape);
}

double support_function(std::span<const Shape> shapes, const Vec2& theta) {
  if (shapes.empty()) raise(ErrorCode::InvalidParameter, "support function of an empty union");
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& s : shapes) h = std::max(h, support_function(s, theta));
  return h;
}

double width(const Shape& shape, const Vec2& theta) {
  return support_function(shape, theta) + support_function(shape, Vec2(-theta));
}

double max_norm(const Shape& shape) {
  return std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return s.center.norm() + s.radius;
        } else if constexpr (std::is_same_v<T, AxisEllipse>) {
          return ellipse_max_norm(s);
        } else {
          double r = 0.0;
          for (const auto& p : s.vertices) r = std::max(r, p.norm());
          return r;
        }
      },
      shape);
}

bool slab_contains(const Shape& shape, const DirectionFrame& frame, double delta,
                   const Vec2& x) {
  return slab_contains(std::span<const Shape>(&shape, 1), frame, delta, x);
}

bool slab_contains(std::span<const Shape> shapes, const DirectionFrame& frame, double delta,
                   const Vec2& x) {
  if (!(delta > 0.0)) raise(ErrorCode::InvalidParameter, "slab depth delta must be > 0");
  const bool inside =
      std::any_of(shapes.begin(), shapes.end(), [&](const Shape& s) { return contains(s, x); });
  if (!inside) return false;
  const double h = support_function(shapes, frame.theta());
  const double p = x.dot(frame.theta());
  return h - delta < p && p <= h;
}

Vec2 boundary_point(const Shape& shape, double s) {
  return std::visit(
      [&](const auto& sh) -> Vec2 {
        using T = std::decay_t<decltype(sh)>;
        const double t = kTwoPi * s;
        if constexpr (std::is_same_v<T, Disk>) {
          return sh.center + sh.radius * Vec2(std::cos(t), std::sin(t));
        } else if constexpr (std::is_same_v<T, AxisEllipse>) {
          return sh.center + Vec2(sh.semi_a * std::cos(t), sh.semi_b * std::sin(t));
        } else {
          const auto& v = sh.vertices;
          double perimeter = 0.0;
          for (std::size_t i = 0; i < v.size(); ++i) perimeter += (v[(i + 1) % v.size()] - v[i]).norm();
          double target = (s - std::floor(s)) * perimeter;
          for (std::size_t i = 0; i < v.size(); ++i) {
            const Vec2 e = v[(i + 1) % v.size()] - v[i];
            const double len = e.norm();
            if (target <= len) return v[i] + (target / len) * e;
            target -= len;
          }
          return v.front();
        }
      },
      shape);
}

ConvexPolygon hull_from_support(std::span<const SupportSample> samples) {
  if (samples.size() < 3)
    raise(ErrorCode::DegenerateHull, "hull needs at least three support directions");

  std::vector<double> angles;
  angles.reserve(samples.size());
  double scale = 0.0;
  for (const auto& s : samples) {
    if (!std::isfinite(s.h)) raise(ErrorCode::DegenerateHull, "support value is not finite");
    angles.push_back(std::atan2(s.frame.theta().y(), s.frame.theta().x()));
    scale = std::max(scale, std::abs(s.h));
  }
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + kTwoPi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
  if (max_gap >= std::numbers::pi - 1e-12)
    raise(ErrorCode::DegenerateHull, "support directions leave the intersection unbounded");

  // Start from a box and clip; grow the box while the result still touches it.
  double box = 4.0 * scale + 1.0;
  for (int attempt = 0; attempt < 40; ++attempt, box *= 8.0) {
    std::vector<Vec2> poly{{-box, -box}, {box, -box}, {box, box}, {-box, box}};
    for (const auto& s : samples) {
      poly = clip(poly, s.frame.theta(), s.h);
      if (poly.empty()) break;
    }
    poly = simplify(std::move(poly), scale);
    if (poly.size() < 3 || !(polygon_area(poly) > 1e-14 * std::max(scale * scale, 1e-30)))
      raise(ErrorCode::DegenerateHull, "half-plane intersection is empty");
    const bool touches = std::any_of(poly.begin(), poly.end(), [&](const Vec2& p) {
      return std::max(std::abs(p.x()), std::abs(p.y())) >= box * (1.0 - 1e-9);
    });
    if (!touches) {
      ConvexPolygon out{std::move(poly)};
      validate(out);
      return out;
    }
  }
  raise(ErrorCode::DegenerateHull, "half-plane intersection is unbounded");
}

double hausdorff_convex(const Shape& a, const Shape& b, int n_directions) {
  double d = 0.0;
  for (int k = 0; k < n_directions; ++k) {
    const double t = kTwoPi * k / n_directions;
    const Vec2 theta(std::cos(t), std::sin(t));
    d = std::max(d, std::abs(support_function(a, theta) - support_function(b, theta)));
  }
  return d;
}

void validate(const Domain& domain) {
  if (const auto* r = std::get_if<Rectangle>(&domain)) {
    if (!(r->x_max > r->x_min) || !(r->y_max > r->y_min))
      raise(ErrorCode::InvalidDomain, "rectangle must have x_max > x_min and y_max > y_min");
  }
}

double diameter(const Domain& domain) {
  if (const auto* r = std::get_if<Rectangle>(&domain))
    return std::hypot(r->x_max - r->x_min, r->y_max - r->y_min);
  return 2.0;
}

double support_function(const Domain& domain, const Vec2& theta) {
  if (const auto* r = std::get_if<Rectangle>(&domain)) {
    return std::max(r->x_min * theta.x(), r->x_max * theta.x()) +
           std::max(r->y_min * theta.y(), r->y_max * theta.y());
  }
  return theta.norm();
}

bool contains(const Domain& domain, const Vec2& x) {
  if (const auto* r = std::get_if<Rectangle>(&domain))
    return x.x() > r->x_min && x.x() < r->x_max && x.y() > r->y_min && x.y() < r->y_max;
  return x.squaredNorm() < 1.0;
}

double boundary_distance(const Domain& domain, const Shape& shape) {
  if (const auto* r = std::get_if<Rectangle>(&domain)) {
    const double right = r->x_max - support_function(shape, Vec2(1.0, 0.0));
    const double left = -support_function(shape, Vec2(-1.0, 0.0)) - r->x_min;
    const double top = r->y_max - support_function(shape, Vec2(0.0, 1.0));
    const double bottom = -support_function(shape, Vec2(0.0, -1.0)) - r->y_min;
    return std::min({right, left, top, bottom});
  }
  return 1.0 - max_norm(shape);
}

void check_margin(const Domain& domain, const Shape& shape) {
  const double margin = kInclusionMarginFraction * diameter(domain);
  const double d = boundary_distance(domain, shape);
  if (d < margin) {
    std::ostringstream os;
    os << "inclusion lies " << d << " from the domain boundary; at least " << margin
       << " is required";
    raise(ErrorCode::InvalidShape, os.str());
  }
}

}  // namespace enclosure
