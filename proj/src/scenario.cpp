#include "advperr/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace advperr {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& field, const std::string& msg) {
  throw std::runtime_error(origin + ": field '" + field + "': " + msg);
}

// `label` is the dotted path used in error messages; lookup uses its last
// component.
json require(const json& j, const std::string& origin, const std::string& label) {
  const auto dot = label.rfind('.');
  const std::string key = dot == std::string::npos ? label : label.substr(dot + 1);
  if (!j.contains(key)) fail(origin, label, "missing");
  return j.at(key);
}

Vec2 parse_vec2(const json& j, const std::string& origin, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(origin, field, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Vec2> parse_points(const json& j, const std::string& origin, const std::string& field) {
  if (!j.is_array()) fail(origin, field, "expected list of [x, y]");
  std::vector<Vec2> out;
  for (const auto& p : j) out.push_back(parse_vec2(p, origin, field));
  return out;
}

json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

json points_to_json(const std::vector<Vec2>& pts) {
  json out = json::array();
  for (const Vec2& p : pts) out.push_back(vec2_to_json(p));
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }

  const int version = require(j, origin, "schema_version").get<int>();
  if (version != kSchemaVersion)
    fail(origin, "schema_version", "unsupported version " + std::to_string(version));

  Scenario s;
  s.scenario_id = require(j, origin, "scenario_id").get<std::string>();
  s.duration_T = require(j, origin, "duration_T").get<int>();
  if (s.duration_T < 2) fail(origin, "duration_T", "must be >= 2");
  s.dt = require(j, origin, "dt").get<double>();
  if (s.dt <= 0.0) fail(origin, "dt", "must be > 0");
  s.planner_kind = require(j, origin, "planner_kind").get<std::string>();
  if (s.planner_kind != "idm" && s.planner_kind != "geometric")
    fail(origin, "planner_kind", "must be 'idm' or 'geometric'");

  if (j.contains("map")) {
    for (const auto& lane : j.at("map")) s.map.push_back(parse_points(lane, origin, "map"));
  }

  const json ego = require(j, origin, "ego_route");
  s.ego_route.start = parse_vec2(require(ego, origin, "ego_route.start"), origin, "ego_route.start");
  s.ego_route.heading = require(ego, origin, "ego_route.heading").get<double>();
  s.ego_route.speed = require(ego, origin, "ego_route.speed").get<double>();
  s.ego_route.route = parse_points(require(ego, origin, "ego_route.route"), origin, "ego_route.route");
  if (s.ego_route.route.size() < 2) fail(origin, "ego_route.route", "needs >= 2 waypoints");
  if (ego.contains("length")) s.ego_route.length = ego.at("length").get<double>();
  if (ego.contains("width")) s.ego_route.width = ego.at("width").get<double>();
  const json speeds = require(ego, origin, "ego_route.route_speeds");
  if (speeds.is_number()) {
    s.ego_route.route_speeds.assign(s.ego_route.route.size(), speeds.get<double>());
  } else {
    for (const auto& v : speeds) s.ego_route.route_speeds.push_back(v.get<double>());
    if (s.ego_route.route_speeds.size() != s.ego_route.route.size())
      fail(origin, "ego_route.route_speeds", "length must match route");
  }

  const json agents = require(j, origin, "agent_scripts");
  int next_id = 0;
  for (const auto& a : agents) {
    AgentScript sc;
    sc.agent_id = a.contains("agent_id") ? a.at("agent_id").get<int>() : next_id;
    sc.waypoints = parse_points(require(a, origin, "agent_scripts.waypoints"), origin,
                                "agent_scripts.waypoints");
    if (sc.waypoints.empty()) fail(origin, "agent_scripts.waypoints", "must be non-empty");
    sc.speed = require(a, origin, "agent_scripts.speed").get<double>();
    if (sc.speed < 0.0) fail(origin, "agent_scripts.speed", "must be >= 0");
    if (a.contains("start_offset")) sc.start_offset = a.at("start_offset").get<double>();
    if (a.contains("heading")) sc.heading = a.at("heading").get<double>();
    if (a.contains("length")) sc.length = a.at("length").get<double>();
    if (a.contains("width")) sc.width = a.at("width").get<double>();
    if (sc.length <= 0.0 || sc.width <= 0.0) fail(origin, "agent_scripts", "extent must be > 0");
    s.agent_scripts.push_back(std::move(sc));
    ++next_id;
  }

  if (s.planner_kind == "idm") {
    if (j.contains("idm")) {
      const json p = j.at("idm");
      if (p.contains("v0")) s.idm.v0 = p.at("v0").get<double>();
      if (p.contains("T_headway")) s.idm.T_headway = p.at("T_headway").get<double>();
      if (p.contains("a_max")) s.idm.a_max = p.at("a_max").get<double>();
      if (p.contains("b_comf")) s.idm.b_comf = p.at("b_comf").get<double>();
      if (p.contains("s0")) s.idm.s0 = p.at("s0").get<double>();
      if (p.contains("delta")) s.idm.delta = p.at("delta").get<double>();
    }
    if (s.idm.v0 <= 0 || s.idm.T_headway <= 0 || s.idm.a_max <= 0 || s.idm.b_comf <= 0 ||
        s.idm.s0 <= 0 || s.idm.delta <= 0)
      fail(origin, "idm", "all parameters must be > 0");
  } else {
    const json m = require(j, origin, "maneuver");
    s.maneuver.maneuver = require(m, origin, "maneuver.maneuver").get<std::string>();
    s.maneuver.gap_accept_s = require(m, origin, "maneuver.gap_accept_s").get<double>();
    if (s.maneuver.gap_accept_s <= 0.0) fail(origin, "maneuver.gap_accept_s", "must be > 0");
    s.maneuver.commit_point = require(m, origin, "maneuver.commit_point").get<double>();
  }

  return s;
}

Scenario load_scenario(const std::string& spec_file) {
  std::ifstream in(spec_file);
  if (!in) throw std::runtime_error("cannot open scenario file: " + spec_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), spec_file);
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario_id"] = s.scenario_id;
  j["duration_T"] = s.duration_T;
  j["dt"] = s.dt;
  j["planner_kind"] = s.planner_kind;
  j["map"] = json::array();
  for (const auto& lane : s.map) j["map"].push_back(points_to_json(lane));
  json ego;
  ego["start"] = vec2_to_json(s.ego_route.start);
  ego["heading"] = s.ego_route.heading;
  ego["speed"] = s.ego_route.speed;
  ego["length"] = s.ego_route.length;
  ego["width"] = s.ego_route.width;
  ego["route"] = points_to_json(s.ego_route.route);
  ego["route_speeds"] = s.ego_route.route_speeds;
  j["ego_route"] = ego;
  j["agent_scripts"] = json::array();
  for (const auto& a : s.agent_scripts) {
    json ja;
    ja["agent_id"] = a.agent_id;
    ja["waypoints"] = points_to_json(a.waypoints);
    ja["speed"] = a.speed;
    ja["start_offset"] = a.start_offset;
    ja["heading"] = a.heading;
    ja["length"] = a.length;
    ja["width"] = a.width;
    j["agent_scripts"].push_back(ja);
  }
  if (s.planner_kind == "idm") {
    j["idm"] = {{"v0", s.idm.v0},       {"T_headway", s.idm.T_headway}, {"a_max", s.idm.a_max},
                {"b_comf", s.idm.b_comf}, {"s0", s.idm.s0},             {"delta", s.idm.delta}};
  } else {
    j["maneuver"] = {{"maneuver", s.maneuver.maneuver},
                     {"gap_accept_s", s.maneuver.gap_accept_s},
                     {"commit_point", s.maneuver.commit_point}};
  }
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_to_json(s);
}

std::uint64_t scenario_hash(const Scenario& s) {
  const std::string text = scenario_to_json(s);
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

bool scenario_equal(const Scenario& a, const Scenario& b) {
  return scenario_to_json(a) == scenario_to_json(b);
}

}  // namespace advperr
