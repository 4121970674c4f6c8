#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advperr/geometry.hpp"

namespace advperr {

inline constexpr int kSchemaVersion = 1;

struct AgentState {
  int agent_id = 0;
  Vec2 position;
  double heading = 0.0;  // radians, wrapped to (-pi, pi]
  double speed = 0.0;    // m/s, >= 0
  double length = 4.5;   // m
  double width = 2.0;    // m
  std::string category = "car";

  OrientedBox box() const { return {position, heading, length, width}; }
};

// Deterministic waypoint script for a non-ego agent: the agent moves along
// the polyline at constant speed and stops at the final waypoint.
struct AgentScript {
  int agent_id = 0;
  std::vector<Vec2> waypoints;
  double speed = 0.0;       // m/s
  double start_offset = 0.0;  // arclength at t = 0, m
  double heading = 0.0;     // used when stationary / single waypoint
  double length = 4.5;
  double width = 2.0;
};

struct IdmParams {
  double v0 = 13.0;        // desired speed, m/s
  double T_headway = 1.5;  // s
  double a_max = 1.5;      // m/s^2
  double b_comf = 2.0;     // m/s^2
  double s0 = 2.0;         // minimum gap, m
  double delta = 4.0;
};

struct ManeuverSpec {
  std::string maneuver = "follow";  // follow | overtake | turn_left | turn_right
  double gap_accept_s = 4.0;        // required predicted time-gap, s
  double commit_point = 0.0;        // arclength on ego route, m
};

struct EgoSpec {
  Vec2 start;
  double heading = 0.0;
  double speed = 0.0;
  double length = 4.5;
  double width = 2.0;
  std::vector<Vec2> route;
  std::vector<double> route_speeds;  // target speed per route waypoint, m/s
};

struct Scenario {
  std::string scenario_id;  // lane_follow | overtake_follow | overtake | left_turn | right_turn
  std::vector<std::vector<Vec2>> map;  // lane centrelines, rendering only
  EgoSpec ego_route;
  std::vector<AgentScript> agent_scripts;
  int duration_T = 0;
  double dt = 0.1;
  std::string planner_kind;  // idm | geometric
  IdmParams idm;
  ManeuverSpec maneuver;

  int agent_count() const { return static_cast<int>(agent_scripts.size()); }
};

// Loads a scenario from its JSON config; throws std::runtime_error with a
// field path on schema violations.
Scenario load_scenario(const std::string& spec_file);
Scenario parse_scenario(const std::string& json_text, const std::string& origin = "<string>");

std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

// FNV-1a hash of the canonical serialisation; stamped into error files so
// attacks are replayable against the scenario they were found on.
std::uint64_t scenario_hash(const Scenario& s);

bool scenario_equal(const Scenario& a, const Scenario& b);

}  // namespace advperr
