#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advperr/sequences.hpp"

namespace advperr {

// Per-agent, per-frame perception error: additive position/orientation error
// and a false-negative switch. fn = true removes the agent entirely and makes
// dx/dphi inert.
struct AgentError {
  Vec2 dx;
  double dphi = 0.0;
  bool fn = false;
};

inline bool operator==(const AgentError& a, const AgentError& b) {
  return a.dx == b.dx && a.dphi == b.dphi && a.fn == b.fn;
}

// Rectangular T x d grid of AgentError.
class ErrorSequence {
 public:
  ErrorSequence() = default;
  ErrorSequence(int duration, int agents)
      : duration_(duration), agents_(agents), grid_(static_cast<std::size_t>(duration) * agents) {}

  int duration() const { return duration_; }
  int agent_count() const { return agents_; }

  AgentError& at(int t, int j) { return grid_[static_cast<std::size_t>(t) * agents_ + j]; }
  const AgentError& at(int t, int j) const {
    return grid_[static_cast<std::size_t>(t) * agents_ + j];
  }

  int fn_count() const;

  friend bool operator==(const ErrorSequence& a, const ErrorSequence& b) {
    return a.duration_ == b.duration_ && a.agents_ == b.agents_ && a.grid_ == b.grid_;
  }

 private:
  int duration_ = 0;
  int agents_ = 0;
  std::vector<AgentError> grid_;
};

// The attack function I(y, e). I(y, 0) reproduces the ground-truth boxes.
PerceivedSequence apply_errors(const GroundTruthSequence& y, const ErrorSequence& e);

// fn true for agent j at every frame, everything else zero.
ErrorSequence full_drop_error(int agent_index, int duration, int agents);

// fn true for agent j on [t1, t2] inclusive.
ErrorSequence segment_drop_error(int agent_index, int t1, int t2, int duration, int agents);

// Robustness-probe perturbation: flip each fn flag with probability
// `strength` and add isotropic Gaussian noise with sigma = strength * 1 m to
// every surviving detection's dx. Deterministic given seed.
ErrorSequence perturb(const ErrorSequence& e, double strength, std::uint64_t seed);

// Columnar serialisation with a scenario-hash header so attacks are
// replayable artifacts.
std::string error_sequence_to_text(const ErrorSequence& e, std::uint64_t scenario_hash);
ErrorSequence error_sequence_from_text(const std::string& text, std::uint64_t* scenario_hash = nullptr);
void save_error_sequence(const ErrorSequence& e, std::uint64_t scenario_hash, const std::string& path);
ErrorSequence load_error_sequence(const std::string& path, std::uint64_t* scenario_hash = nullptr);

}  // namespace advperr
