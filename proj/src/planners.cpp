#include "advperr/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace advperr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxBrake = -6.0;
constexpr double kMaxAccel = 3.0;
constexpr double kMaxCurvature = 0.2;

constexpr double kCorridorHalfWidth = 2.0;  // m, IDM leader gating
constexpr double kPredictionHorizon = 5.0;  // s
constexpr double kPredictionStep = 0.25;    // s
constexpr double kConflictWindow = 25.0;    // m of route past the commit point
constexpr double kConflictRadius = 2.5;     // m
constexpr double kMinConflictSpeed = 0.5;   // m/s
constexpr double kComfortBrake = 2.0;       // m/s^2, stop-line approach

double pure_pursuit_curvature(const EgoPose& ego, const Polyline& path) {
  const double s = path.project(ego.position);
  const double lookahead = std::clamp(ego.speed * 1.0, 3.0, 8.0);
  const Vec2 target = path.point_at(s + lookahead);
  const Vec2 to_target = target - ego.position;
  const double dist = to_target.norm();
  if (dist < 1e-6) return 0.0;
  const double eta = wrap_angle(std::atan2(to_target.y, to_target.x) - ego.heading);
  return std::clamp(2.0 * std::sin(eta) / dist, -kMaxCurvature, kMaxCurvature);
}

double speed_tracking_accel(double v, double v_target) {
  return std::clamp(1.5 * (v_target - v), kMaxBrake, kMaxAccel);
}

// Deceleration command that brings the ego to rest at the given remaining
// distance, comfortable when there is room, hard when there is not.
double stop_at_accel(double v, double remaining) {
  if (remaining <= 0.3) return v > 0.05 ? kMaxBrake : 0.0;
  const double v_envelope = std::sqrt(2.0 * kComfortBrake * std::max(remaining - 0.3, 0.0));
  return std::clamp(2.0 * (v_envelope - v), kMaxBrake, 0.5);
}

}  // namespace

RoutePlan::RoutePlan(std::vector<Vec2> waypoints, std::vector<double> speeds)
    : path_(std::move(waypoints)), speeds_(std::move(speeds)) {}

double RoutePlan::speed_at(double s) const {
  if (speeds_.empty()) return 0.0;
  if (speeds_.size() == 1) return speeds_[0];
  // Piecewise linear over the waypoint arclengths.
  const auto& pts = path_.points();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double seg = (pts[i + 1] - pts[i]).norm();
    if (s <= cum + seg || i + 2 == pts.size()) {
      const double t = seg > 0.0 ? std::clamp((s - cum) / seg, 0.0, 1.0) : 0.0;
      return speeds_[i] + t * (speeds_[i + 1] - speeds_[i]);
    }
    cum += seg;
  }
  return speeds_.back();
}

double idm_acceleration(double v, double gap, double v_lead, const IdmParams& p) {
  if (!(gap > 0.0)) return kMaxBrake;  // emergency: zero or negative gap
  const double free_flow = 1.0 - std::pow(v / p.v0, p.delta);
  if (std::isinf(gap)) return std::clamp(p.a_max * free_flow, kMaxBrake, p.a_max);
  const double dv = v - v_lead;
  const double s_star = p.s0 + v * p.T_headway + v * dv / (2.0 * std::sqrt(p.a_max * p.b_comf));
  const double a = p.a_max * (free_flow - (s_star / gap) * (s_star / gap));
  return std::clamp(a, kMaxBrake, p.a_max);
}

PlannerAction plan_idm(const std::vector<Track>& tracks, const EgoPose& ego, const RoutePlan& route,
                       const IdmParams& p) {
  const Polyline& path = route.path();
  const double s_ego = path.project(ego.position);

  // Leader: nearest confirmed track ahead on the route within the corridor.
  double gap = kInf, v_lead = 0.0;
  for (const Track& t : tracks) {
    if (!t.confirmed) continue;
    if (path.lateral_distance(t.position()) > kCorridorHalfWidth) continue;
    const double s_t = path.project(t.position());
    if (s_t <= s_ego) continue;
    const double g = (s_t - s_ego) - 0.5 * (ego.length + t.length);
    if (g < gap) {
      gap = g;
      const Vec2 tangent = path.tangent_at(s_t);
      v_lead = t.speed * (Vec2{std::cos(t.heading()), std::sin(t.heading())}.dot(tangent));
    }
  }

  IdmParams eff = p;
  eff.v0 = std::min(p.v0, std::max(route.speed_at(s_ego), 0.1));
  PlannerAction a;
  a.accel = idm_acceleration(ego.speed, gap, v_lead, eff);
  a.curvature = pure_pursuit_curvature(ego, path);
  return a;
}

double predicted_conflict_time(const Track& track, const RoutePlan& route, const ManeuverSpec& m) {
  if (track.speed < kMinConflictSpeed) return kInf;
  const Polyline& path = route.path();
  const Vec2 vel = Vec2{std::cos(track.heading()), std::sin(track.heading())} * track.speed;
  const double s_lo = m.commit_point;
  const double s_hi = std::min(m.commit_point + kConflictWindow, path.total_length());
  for (double t = 0.0; t <= kPredictionHorizon + 1e-9; t += kPredictionStep) {
    const Vec2 pos = track.position() + vel * t;
    const double s = path.project(pos);
    if (s >= s_lo - 1e-9 && s <= s_hi && path.lateral_distance(pos) <= kConflictRadius) return t;
  }
  return kInf;
}

PlannerAction plan_geometric(const std::vector<Track>& tracks, const EgoPose& ego,
                             const RoutePlan& route, const ManeuverSpec& m, bool& committed) {
  const Polyline& path = route.path();
  const double s_ego = path.project(ego.position);

  if (!committed && s_ego >= m.commit_point) committed = true;

  PlannerAction a;
  a.curvature = pure_pursuit_curvature(ego, path);

  if (!committed) {
    bool blocked = false;
    for (const Track& t : tracks) {
      if (!t.confirmed) continue;
      if (predicted_conflict_time(t, route, m) < m.gap_accept_s) {
        blocked = true;
        break;
      }
    }
    if (blocked) {
      // Hold just before the commit point.
      const double remaining = m.commit_point - s_ego - 0.5 * ego.length;
      a.accel = stop_at_accel(ego.speed, remaining);
      a.holding = true;
      return a;
    }
  }

  a.accel = speed_tracking_accel(ego.speed, route.speed_at(s_ego));
  return a;
}

}  // namespace advperr
