#include "advperr/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace advperr {

namespace {

constexpr double kMaxBrake = -6.0;
constexpr double kMaxAccel = 3.0;
constexpr double kMaxCurvature = 0.2;
constexpr double kReplanInterval = 1.0;  // s

AgentState scripted_state(const AgentScript& sc, double t) {
  AgentState a;
  a.agent_id = sc.agent_id;
  a.length = sc.length;
  a.width = sc.width;
  const Polyline path(sc.waypoints);
  const double total = path.total_length();
  if (sc.waypoints.size() < 2 || total <= 0.0 || sc.speed <= 0.0) {
    a.position = sc.waypoints.front();
    a.heading = wrap_angle(sc.heading);
    a.speed = 0.0;
    return a;
  }
  const double s = sc.start_offset + sc.speed * t;
  a.position = path.point_at(s);
  a.heading = wrap_angle(path.heading_at(std::min(s, total)));
  a.speed = s >= total ? 0.0 : sc.speed;  // stops at the final waypoint
  return a;
}

void integrate_ego(AgentState& ego, const PlannerAction& action, double dt) {
  const double a = std::clamp(action.accel, kMaxBrake, kMaxAccel);
  const double kappa = std::clamp(action.curvature, -kMaxCurvature, kMaxCurvature);
  ego.speed = std::max(0.0, ego.speed + a * dt);
  ego.heading = wrap_angle(ego.heading + ego.speed * kappa * dt);
  ego.position.x += ego.speed * std::cos(ego.heading) * dt;
  ego.position.y += ego.speed * std::sin(ego.heading) * dt;
}

}  // namespace

int replan_stride(const Scenario& scenario) {
  return std::max(1, static_cast<int>(std::lround(kReplanInterval / scenario.dt)));
}

std::vector<std::vector<AgentState>> generate_agent_states(const Scenario& scenario) {
  std::vector<std::vector<AgentState>> out(scenario.duration_T);
  for (int t = 0; t < scenario.duration_T; ++t) {
    out[t].reserve(scenario.agent_scripts.size());
    for (const AgentScript& sc : scenario.agent_scripts)
      out[t].push_back(scripted_state(sc, t * scenario.dt));
  }
  return out;
}

Rollout rollout(const Scenario& scenario, const ErrorSequence& e) {
  if (e.duration() != scenario.duration_T || e.agent_count() != scenario.agent_count())
    throw std::invalid_argument("rollout: error sequence does not match scenario dimensions");

  const auto agents = generate_agent_states(scenario);

  // Build the perceived sequence once (open loop: agent world-frame states
  // never depend on ego).
  GroundTruthSequence y;
  y.frames.resize(scenario.duration_T);
  for (int t = 0; t < scenario.duration_T; ++t) {
    y.frames[t].timestamp = t * scenario.dt;
    y.frames[t].agents = agents[t];
  }
  Rollout r;
  r.perceived = apply_errors(y, e);

  const RoutePlan route(scenario.ego_route.route, scenario.ego_route.route_speeds);
  AgentState ego;
  ego.agent_id = -1;
  ego.position = scenario.ego_route.start;
  ego.heading = wrap_angle(scenario.ego_route.heading);
  ego.speed = scenario.ego_route.speed;
  ego.length = scenario.ego_route.length;
  ego.width = scenario.ego_route.width;

  MultiObjectTracker tracker;
  const int stride = replan_stride(scenario);
  PlannerAction held;
  bool committed = false;  // geometric planner latch, owned by the rollout

  r.ego_trajectory.reserve(scenario.duration_T);
  r.frame_min_separation.reserve(scenario.duration_T);
  double rule_min = std::numeric_limits<double>::infinity();

  for (int t = 0; t < scenario.duration_T; ++t) {
    const std::vector<Track> confirmed = tracker.step(r.perceived.frames[t], scenario.dt);

    if (t % stride == 0) {
      const EgoPose pose{ego.position, ego.heading, ego.speed, ego.length, ego.width};
      if (scenario.planner_kind == "idm") {
        held = plan_idm(confirmed, pose, route, scenario.idm);
      } else {
        held = plan_geometric(confirmed, pose, route, scenario.maneuver, committed);
      }
      r.actions.push_back(held);
    }

    r.ego_trajectory.push_back(ego);
    double frame_min = std::numeric_limits<double>::infinity();
    for (const AgentState& a : agents[t])
      frame_min = std::min(frame_min, signed_separation(ego.box(), a.box()));
    r.frame_min_separation.push_back(frame_min);
    rule_min = std::min(rule_min, frame_min);

    if (t + 1 < scenario.duration_T) integrate_ego(ego, held, scenario.dt);
  }

  r.rule_value = rule_min;
  return r;
}

double evaluate_rule(const Scenario& scenario, const Rollout& r) {
  const auto agents = generate_agent_states(scenario);
  double rule_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < r.ego_trajectory.size() && t < agents.size(); ++t) {
    for (const AgentState& a : agents[t])
      rule_min = std::min(rule_min, signed_separation(r.ego_trajectory[t].box(), a.box()));
  }
  return rule_min;
}

GroundTruthSequence generate_ground_truth(const Scenario& scenario) {
  const auto agents = generate_agent_states(scenario);
  const ErrorSequence zero(scenario.duration_T, scenario.agent_count());
  const Rollout perfect = rollout(scenario, zero);

  GroundTruthSequence y;
  y.frames.resize(scenario.duration_T);
  for (int t = 0; t < scenario.duration_T; ++t) {
    y.frames[t].timestamp = t * scenario.dt;
    y.frames[t].ego = perfect.ego_trajectory[t];
    y.frames[t].agents = agents[t];
  }
  return y;
}

std::string rollout_to_csv(const Scenario& scenario, const Rollout& r) {
  const auto agents = generate_agent_states(scenario);
  std::ostringstream out;
  out << "frame,time,ego_x,ego_y,ego_heading,ego_speed,rule_running_min";
  for (int j = 0; j < scenario.agent_count(); ++j)
    out << ",a" << j << "_x,a" << j << "_y,a" << j << "_heading,a" << j << "_speed";
  out << ",perceived\n";

  auto num = [](double v) {
    char buf[32];
    const double clipped = std::isinf(v) ? (v > 0 ? kNoAgentSentinel : -kNoAgentSentinel) : v;
    std::snprintf(buf, sizeof(buf), "%.9g", clipped);
    return std::string(buf);
  };

  double running = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < r.ego_trajectory.size(); ++t) {
    running = std::min(running, r.frame_min_separation[t]);
    const AgentState& ego = r.ego_trajectory[t];
    out << t << ',' << num(t * scenario.dt) << ',' << num(ego.position.x) << ','
        << num(ego.position.y) << ',' << num(ego.heading) << ',' << num(ego.speed) << ','
        << num(running);
    for (const AgentState& a : agents[t])
      out << ',' << num(a.position.x) << ',' << num(a.position.y) << ',' << num(a.heading) << ','
          << num(a.speed);
    out << ',';
    const auto& dets = r.perceived.frames[t];
    for (std::size_t k = 0; k < dets.size(); ++k) {
      if (k) out << ';';
      out << num(dets[k].position.x) << ':' << num(dets[k].position.y) << ':'
          << num(dets[k].heading);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace advperr
