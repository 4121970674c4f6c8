#include "advperr/geometry.hpp"

#include <algorithm>
#include <limits>

namespace advperr {

double wrap_angle(double a) {
  constexpr double kPi = 3.14159265358979323846;
  constexpr double kTwoPi = 2.0 * kPi;
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  if (a > kPi) a -= kTwoPi;
  return a;
}

double angle_diff(double a, double b) { return std::abs(wrap_angle(a - b)); }

std::array<Vec2, 4> OrientedBox::corners() const {
  const double c = std::cos(heading), s = std::sin(heading);
  const Vec2 ax{c, s}, ay{-s, c};
  const double hl = 0.5 * length, hw = 0.5 * width;
  return {center + ax * hl + ay * hw, center + ax * hl - ay * hw,
          center - ax * hl - ay * hw, center - ax * hl + ay * hw};
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

namespace {

// Projection interval of a box onto a unit axis.
void project_onto(const std::array<Vec2, 4>& corners, const Vec2& axis, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const Vec2& c : corners) {
    const double v = c.dot(axis);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

}  // namespace

bool boxes_intersect(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners(), cb = b.corners();
  const std::array<Vec2, 4> axes = {
      Vec2{std::cos(a.heading), std::sin(a.heading)},
      Vec2{-std::sin(a.heading), std::cos(a.heading)},
      Vec2{std::cos(b.heading), std::sin(b.heading)},
      Vec2{-std::sin(b.heading), std::cos(b.heading)}};
  for (const Vec2& axis : axes) {
    double alo, ahi, blo, bhi;
    project_onto(ca, axis, alo, ahi);
    project_onto(cb, axis, blo, bhi);
    if (std::min(ahi, bhi) - std::max(alo, blo) < 0.0) return false;
  }
  return true;
}

double signed_separation(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners(), cb = b.corners();
  const std::array<Vec2, 4> axes = {
      Vec2{std::cos(a.heading), std::sin(a.heading)},
      Vec2{-std::sin(a.heading), std::cos(a.heading)},
      Vec2{std::cos(b.heading), std::sin(b.heading)},
      Vec2{-std::sin(b.heading), std::cos(b.heading)}};

  double min_overlap = std::numeric_limits<double>::infinity();
  bool separated = false;
  for (const Vec2& axis : axes) {
    double alo, ahi, blo, bhi;
    project_onto(ca, axis, alo, ahi);
    project_onto(cb, axis, blo, bhi);
    const double overlap = std::min(ahi, bhi) - std::max(alo, blo);
    if (overlap < 0.0) separated = true;
    min_overlap = std::min(min_overlap, overlap);
  }
  if (!separated) {
    // Overlapping: the minimum overlap over the face normals is the exact
    // minimum-translation depth for convex polygons in 2D.
    return -min_overlap;
  }
  // Disjoint convex polygons: the closest feature pair is vertex-edge, so the
  // minimum over both vertex/edge sets is exact.
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
    }
  }
  return best;
}

double point_box_distance(const Vec2& p, const OrientedBox& b) {
  // Transform into the box frame and use the axis-aligned formula.
  const double c = std::cos(b.heading), s = std::sin(b.heading);
  const Vec2 d = p - b.center;
  const double lx = std::abs(d.x * c + d.y * s) - 0.5 * b.length;
  const double ly = std::abs(-d.x * s + d.y * c) - 0.5 * b.width;
  const double ox = std::max(lx, 0.0), oy = std::max(ly, 0.0);
  return std::hypot(ox, oy);
}

Polyline::Polyline(std::vector<Vec2> pts) : pts_(std::move(pts)) {
  cum_.reserve(pts_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    if (i > 0) s += (pts_[i] - pts_[i - 1]).norm();
    cum_.push_back(s);
  }
}

Vec2 Polyline::point_at(double s) const {
  if (pts_.empty()) return {};
  if (pts_.size() == 1 || s <= 0.0) return pts_.front();
  if (s >= cum_.back()) return pts_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  const double seg = cum_[i] - cum_[i - 1];
  const double t = seg > 0.0 ? (s - cum_[i - 1]) / seg : 0.0;
  return pts_[i - 1] + (pts_[i] - pts_[i - 1]) * t;
}

Vec2 Polyline::tangent_at(double s) const {
  if (pts_.size() < 2) return {1.0, 0.0};
  std::size_t i = 1;
  if (s >= cum_.back()) {
    i = pts_.size() - 1;
  } else if (s > 0.0) {
    i = static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), s) - cum_.begin());
    i = std::min(i, pts_.size() - 1);
  }
  // Skip zero-length segments.
  while (i + 1 < pts_.size() && (pts_[i] - pts_[i - 1]).squared_norm() == 0.0) ++i;
  return (pts_[i] - pts_[i - 1]).normalized();
}

double Polyline::heading_at(double s) const {
  const Vec2 t = tangent_at(s);
  return std::atan2(t.y, t.x);
}

double Polyline::project(const Vec2& p) const {
  if (pts_.size() < 2) return 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    const Vec2 a = pts_[i], b = pts_[i + 1];
    const Vec2 ab = b - a;
    const double len2 = ab.squared_norm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 q = a + ab * t;
    const double d2 = (p - q).squared_norm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = cum_[i] + t * std::sqrt(len2);
    }
  }
  return best_s;
}

double Polyline::lateral_distance(const Vec2& p) const {
  if (pts_.empty()) return std::numeric_limits<double>::infinity();
  if (pts_.size() == 1) return (p - pts_[0]).norm();
  return (p - point_at(project(p))).norm();
}

}  // namespace advperr
