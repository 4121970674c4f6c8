#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace advperr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  Vec2 perp() const { return {-y, x}; }
};

inline bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

// Smallest absolute difference between two angles, in [0, pi].
double angle_diff(double a, double b);

// Oriented rectangle in the plane: centre, heading, full length/width.
struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;

  std::array<Vec2, 4> corners() const;
};

// Signed separation between two oriented rectangles: the Euclidean clearance
// when disjoint, minus the minimum-translation penetration depth on overlap.
double signed_separation(const OrientedBox& a, const OrientedBox& b);

bool boxes_intersect(const OrientedBox& a, const OrientedBox& b);

// Distance from a point to a rectangle boundary or interior (0 inside).
double point_box_distance(const Vec2& p, const OrientedBox& b);

// Distance from a point to a segment.
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Piecewise-linear curve with arclength queries; used for routes and agent
// scripts.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> pts);

  const std::vector<Vec2>& points() const { return pts_; }
  double total_length() const { return cum_.empty() ? 0.0 : cum_.back(); }

  // Point at arclength s (clamped to [0, length]).
  Vec2 point_at(double s) const;
  // Unit tangent at arclength s.
  Vec2 tangent_at(double s) const;
  double heading_at(double s) const;

  // Arclength of the closest point on the curve to p.
  double project(const Vec2& p) const;
  // Lateral distance from p to the curve.
  double lateral_distance(const Vec2& p) const;

 private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;  // cumulative arclength, cum_[0] = 0
};

}  // namespace advperr
