#pragma once

#include <vector>

#include "advperr/scenario.hpp"

namespace advperr {

struct Frame {
  double timestamp = 0.0;
  AgentState ego;
  std::vector<AgentState> agents;
};

// y = [s_0, ..., s_{T-1}]: per-frame world states of ego and agents.
struct GroundTruthSequence {
  std::vector<Frame> frames;

  int duration() const { return static_cast<int>(frames.size()); }
  int agent_count() const { return frames.empty() ? 0 : static_cast<int>(frames[0].agents.size()); }
};

// A perceived object. Extent and velocity are ground-truth passthrough; the
// source agent id is metric bookkeeping only and is stripped before the
// tracker/planner see the detection.
struct Detection {
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  double length = 4.5;
  double width = 2.0;
  int source_agent_id = -1;
};

struct PerceivedSequence {
  std::vector<std::vector<Detection>> frames;

  int duration() const { return static_cast<int>(frames.size()); }
};

}  // namespace advperr
