#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "advperr/metrics.hpp"
#include "advperr/pem.hpp"
#include "advperr/world.hpp"

namespace advperr {

enum class Objective { kNds, kNdsT, kPemLl };

Objective objective_from_string(const std::string& name);
std::string objective_name(Objective o);

struct TraceEntry {
  int rollout_index = 0;
  double alpha = 0.0;
  double rule_value = 0.0;
  MetricReport metrics;
  double pem_ll = 0.0;
};

struct AttackResult {
  double best_alpha = 0.0;
  ErrorSequence best_error;
  std::vector<TraceEntry> trace;  // adversarial rollouts only, alpha non-decreasing
  int rollout_count = 0;
  Objective objective = Objective::kNdsT;
};

struct HeuristicResult {
  // Minimal segment-drop attacks, one per influential agent, each verified
  // failing.
  std::vector<ErrorSequence> attacks;
  std::vector<int> influential_agents;
  int rollout_count = 0;
  std::string status;  // "ok" or "no_influential_agents"
};

// Bisection on a monotone frame predicate with a fixed iteration budget.
// Returns a frame on the satisfied (pred == true) side, within
// (hi - lo) / 2^iters of the true boundary.
int bisect(const std::function<bool(int)>& pred, int lo, int hi, int iters = 3);

// Alg. 1: per-agent full-track drops to find influential agents, then start
// and end time bisection to shrink each drop to a minimal failing window.
HeuristicResult heuristic_search(const Scenario& scenario);

// Proposal distribution for the random search: flip a random sub-segment of a
// false-negative run back to detected, with uniform-direction position error
// of magnitude U[0, 5] m and Gaussian orientation noise (sigma 0.1 rad). When
// e has no fn frames the proposal instead shrinks the errors of a random
// segment (documented extension).
ErrorSequence propose(const ErrorSequence& e, std::uint64_t seed);

struct RandomSearchParams {
  int n_steps = 40;
  int n_proposals = 100;
};

// Alg. 2: boundary-walk refinement of a failing error sequence. Proposals
// are pre-screened against the previous rollout's ground truth; one
// metric-improving proposal (chosen uniformly) is rolled out per step and
// accepted iff the rule still fails.
AttackResult random_search(const Scenario& scenario, const ErrorSequence& e0, Objective objective,
                           const PemModel& pem, std::uint64_t seed, RandomSearchParams params = {});

struct ProbePoint {
  double strength = 0.0;
  double adversarial_fraction = 0.0;
  double mean_nds = 0.0;
  double mean_nds_t = 0.0;
};

// Isolation probe: perturb the attack at increasing strengths and measure
// how often it still breaks the rule and how the metrics degrade.
std::vector<ProbePoint> robustness_probe(const Scenario& scenario, const ErrorSequence& e_star,
                                         const std::vector<double>& strengths, int n,
                                         std::uint64_t seed);

// Objective value of a perceived sequence (PEM LL squashed to (0, 1) via a
// logistic map for alpha bookkeeping).
double objective_value(Objective o, const GroundTruthSequence& y, const PerceivedSequence& y_hat,
                       const ErrorSequence& e, const PemModel& pem);

}  // namespace advperr
