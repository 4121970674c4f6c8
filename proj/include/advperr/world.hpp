#pragma once

#include <string>
#include <vector>

#include "advperr/errors.hpp"
#include "advperr/planners.hpp"
#include "advperr/sequences.hpp"

namespace advperr {

// Serialised stand-in for the +inf "no agents" sentinel.
inline constexpr double kNoAgentSentinel = 1e9;

struct Rollout {
  std::vector<AgentState> ego_trajectory;  // length duration_T
  std::vector<PlannerAction> actions;      // one per replan tick
  double rule_value = 0.0;                 // signed minimum separation, m
  PerceivedSequence perceived;
  std::vector<double> frame_min_separation;  // per-frame min over agents
};

// Deterministic ground truth: scripted agents plus the perfect-perception ego
// trajectory.
GroundTruthSequence generate_ground_truth(const Scenario& scenario);

// Scripted agent states only (the open-loop part that never depends on e).
std::vector<std::vector<AgentState>> generate_agent_states(const Scenario& scenario);

// Open-loop rollout: apply I(y, e), track, replan ego at the planning
// interval, integrate ego kinematics, and score the driving rule.
Rollout rollout(const Scenario& scenario, const ErrorSequence& e);

// Minimum signed separation over frames and agents; +inf when the scenario
// has no agents.
double evaluate_rule(const Scenario& scenario, const Rollout& r);

// Frame-per-row CSV dump (columns documented in the README).
std::string rollout_to_csv(const Scenario& scenario, const Rollout& r);

// Replan interval in frames (1 s planning decision interval).
int replan_stride(const Scenario& scenario);

}  // namespace advperr
