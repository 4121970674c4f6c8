#pragma once

#include <vector>

#include "advperr/scenario.hpp"
#include "advperr/tracker.hpp"

namespace advperr {

// Command applied to the ego kinematics, held between replans.
struct PlannerAction {
  double accel = 0.0;      // m/s^2, clamped to [-6, +3] by the simulator
  double curvature = 0.0;  // 1/m, |kappa| <= 0.2
  bool holding = false;    // geometric planner: waiting at the stop line
};

struct EgoPose {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  double length = 4.5;
  double width = 2.0;
};

// Ego route with a per-waypoint target speed profile, interpolated over
// arclength.
class RoutePlan {
 public:
  RoutePlan() = default;
  RoutePlan(std::vector<Vec2> waypoints, std::vector<double> speeds);

  const Polyline& path() const { return path_; }
  double speed_at(double s) const;

 private:
  Polyline path_;
  std::vector<double> speeds_;
};

// Intelligent Driver Model longitudinal law. gap = +inf means no leader;
// gap <= 0 is treated as an emergency stop (-6 m/s^2).
double idm_acceleration(double v, double gap, double v_lead, const IdmParams& p);

// Path-following IDM planner: leader = nearest confirmed track ahead on the
// route within a 2 m lateral corridor; steering by pure pursuit.
PlannerAction plan_idm(const std::vector<Track>& tracks, const EgoPose& ego, const RoutePlan& route,
                       const IdmParams& p);

// Geometric gap-acceptance planner. Predicts tracks at constant velocity over
// a 5 s horizon and proceeds past the commit point only when the predicted
// time-gap to every conflicting track exceeds gap_accept_s; otherwise it
// holds at the stop line. `committed` is the rollout-owned latch: once set it
// never yields.
PlannerAction plan_geometric(const std::vector<Track>& tracks, const EgoPose& ego,
                             const RoutePlan& route, const ManeuverSpec& m, bool& committed);

// Exposed for tests: earliest predicted time (s) at which the track enters
// the conflict region past the commit point, or +inf if it never does within
// the horizon. Near-stationary tracks never conflict (the route is planned
// around static obstacles).
double predicted_conflict_time(const Track& track, const RoutePlan& route, const ManeuverSpec& m);

}  // namespace advperr
