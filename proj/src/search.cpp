#include "advperr/search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "advperr/rng.hpp"

namespace advperr {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kProposalMaxShift = 5.0;   // m
constexpr double kProposalPhiSigma = 0.1;   // rad

// Bracket-trusting bisection: pred(t_true) is known true, pred(t_false)
// assumed false; each iteration costs one predicate evaluation.
int bisect_known(const std::function<bool(int)>& pred, int t_true, int t_false, int iters) {
  for (int i = 0; i < iters && t_true != t_false; ++i) {
    const int mid = t_true + (t_false - t_true) / 2;
    if (mid == t_true) break;
    if (pred(mid)) {
      t_true = mid;
    } else {
      t_false = mid;
    }
  }
  return t_true;
}
}  // namespace

Objective objective_from_string(const std::string& name) {
  if (name == "nds") return Objective::kNds;
  if (name == "nds-t" || name == "nds_t") return Objective::kNdsT;
  if (name == "pem-ll" || name == "pem_ll") return Objective::kPemLl;
  throw std::invalid_argument("unknown objective: " + name);
}

std::string objective_name(Objective o) {
  switch (o) {
    case Objective::kNds: return "nds";
    case Objective::kNdsT: return "nds-t";
    case Objective::kPemLl: return "pem-ll";
  }
  return "?";
}

int bisect(const std::function<bool(int)>& pred, int lo, int hi, int iters) {
  const bool plo = pred(lo), phi = pred(hi);
  if (plo == phi) throw std::invalid_argument("bisect: predicate does not bracket a boundary");
  return plo ? bisect_known(pred, lo, hi, iters) : bisect_known(pred, hi, lo, iters);
}

HeuristicResult heuristic_search(const Scenario& scenario) {
  const int T = scenario.duration_T;
  const int d = scenario.agent_count();
  HeuristicResult result;

  auto fails = [&](const ErrorSequence& e) {
    ++result.rollout_count;
    return rollout(scenario, e).rule_value < 0.0;
  };

  for (int j = 0; j < d; ++j) {
    if (!fails(full_drop_error(j, T, d))) continue;
    result.influential_agents.push_back(j);

    // Largest start of a tail drop that still fails.
    const int t_start = bisect_known(
        [&](int t) { return fails(segment_drop_error(j, t, T - 1, T, d)); }, 0, T - 1, 3);
    // Smallest end of the [t_start, t_end] drop that still fails.
    const int t_end = bisect_known(
        [&](int t) { return fails(segment_drop_error(j, t_start, t, T, d)); }, T - 1, t_start, 3);

    ErrorSequence minimal = segment_drop_error(j, t_start, t_end, T, d);
    if (fails(minimal)) {
      result.attacks.push_back(std::move(minimal));
    } else {
      // Bisection monotonicity violated; fall back to the known-failing full
      // drop.
      result.attacks.push_back(full_drop_error(j, T, d));
    }
  }

  result.status = result.attacks.empty() ? "no_influential_agents" : "ok";
  return result;
}

ErrorSequence propose(const ErrorSequence& e, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x70726f70ULL));
  ErrorSequence out = e;
  const int T = e.duration(), d = e.agent_count();

  // Maximal false-negative runs.
  struct Run {
    int agent, start, end;
  };
  std::vector<Run> runs;
  for (int j = 0; j < d; ++j) {
    int start = -1;
    for (int t = 0; t <= T; ++t) {
      const bool fn = t < T && e.at(t, j).fn;
      if (fn && start < 0) start = t;
      if (!fn && start >= 0) {
        runs.push_back({j, start, t - 1});
        start = -1;
      }
    }
  }

  if (runs.empty()) {
    // No fn frames left: shrink the pose errors of a random segment instead.
    const int j = static_cast<int>(rng.uniform_int(std::max(d, 1)));
    int t1 = static_cast<int>(rng.uniform_int(T));
    int t2 = static_cast<int>(rng.uniform_int(T));
    if (t1 > t2) std::swap(t1, t2);
    const double shrink = rng.uniform();
    for (int t = t1; t <= t2; ++t) {
      out.at(t, j).dx = out.at(t, j).dx * shrink;
      out.at(t, j).dphi *= shrink;
    }
    return out;
  }

  const Run run = runs[rng.uniform_int(runs.size())];
  const int len = run.end - run.start + 1;
  int t1 = run.start + static_cast<int>(rng.uniform_int(len));
  int t2 = run.start + static_cast<int>(rng.uniform_int(len));
  if (t1 > t2) std::swap(t1, t2);
  for (int t = t1; t <= t2; ++t) {
    AgentError& a = out.at(t, run.agent);
    a.fn = false;
    const double mag = rng.uniform(0.0, kProposalMaxShift);
    const double dir = rng.uniform(0.0, kTwoPi);
    a.dx = {mag * std::cos(dir), mag * std::sin(dir)};
    a.dphi = rng.normal(0.0, kProposalPhiSigma);
  }
  return out;
}

double objective_value(Objective o, const GroundTruthSequence& y, const PerceivedSequence& y_hat,
                       const ErrorSequence& e, const PemModel& pem) {
  switch (o) {
    case Objective::kNds:
      return nds(y, y_hat);
    case Objective::kNdsT:
      return nds_t(y, y_hat);
    case Objective::kPemLl: {
      const double ll = log_likelihood(pem, y, e);
      return 1.0 / (1.0 + std::exp(-ll));  // monotone squash for alpha bookkeeping
    }
  }
  return 0.0;
}

AttackResult random_search(const Scenario& scenario, const ErrorSequence& e0, Objective objective,
                           const PemModel& pem, std::uint64_t seed, RandomSearchParams params) {
  const GroundTruthSequence y = generate_ground_truth(scenario);

  AttackResult result;
  result.objective = objective;

  // Precondition check; not counted against the search budget (the caller
  // already established e0 fails, this replays it for the trace's entry 0).
  Rollout r0 = rollout(scenario, e0);
  if (r0.rule_value >= 0.0)
    throw std::invalid_argument("random_search: initial error sequence does not fail the rule");

  ErrorSequence current = e0;
  double alpha = objective_value(objective, y, r0.perceived, e0, pem);
  result.trace.push_back({result.rollout_count, alpha, r0.rule_value,
                          metric_report(y, r0.perceived), log_likelihood(pem, y, e0)});

  for (int step = 1; step <= params.n_steps; ++step) {
    // Pre-screen all proposals against the (unchanged, open-loop) ground
    // truth; only a metric-improving proposal earns a full rollout.
    std::vector<ErrorSequence> proposals;
    std::vector<int> improving;
    proposals.reserve(params.n_proposals);
    for (int p = 0; p < params.n_proposals; ++p) {
      ErrorSequence ep = propose(current, derive_seed(seed, step, p));
      const double ap = objective_value(objective, y, apply_errors(y, ep), ep, pem);
      if (ap > alpha) improving.push_back(p);
      proposals.push_back(std::move(ep));
    }
    if (improving.empty()) continue;

    Rng pick_rng(derive_seed(seed, step, 0xffffffffULL));
    const int pick = improving[pick_rng.uniform_int(improving.size())];
    const ErrorSequence& candidate = proposals[pick];

    const Rollout r = rollout(scenario, candidate);
    ++result.rollout_count;
    if (r.rule_value < 0.0) {
      current = candidate;
      alpha = objective_value(objective, y, r.perceived, current, pem);
      result.trace.push_back({result.rollout_count, alpha, r.rule_value,
                              metric_report(y, r.perceived), log_likelihood(pem, y, current)});
    }
  }

  result.best_alpha = alpha;
  result.best_error = std::move(current);
  return result;
}

std::vector<ProbePoint> robustness_probe(const Scenario& scenario, const ErrorSequence& e_star,
                                         const std::vector<double>& strengths, int n,
                                         std::uint64_t seed) {
  const GroundTruthSequence y = generate_ground_truth(scenario);
  std::vector<ProbePoint> curve;
  curve.reserve(strengths.size());
  for (std::size_t si = 0; si < strengths.size(); ++si) {
    ProbePoint pt;
    pt.strength = strengths[si];
    for (int i = 0; i < n; ++i) {
      const ErrorSequence e = perturb(e_star, pt.strength, derive_seed(seed, si, i));
      const Rollout r = rollout(scenario, e);
      if (r.rule_value < 0.0) pt.adversarial_fraction += 1.0;
      const MetricReport rep = metric_report(y, r.perceived);
      pt.mean_nds += rep.nds;
      pt.mean_nds_t += rep.nds_t;
    }
    pt.adversarial_fraction /= n;
    pt.mean_nds /= n;
    pt.mean_nds_t /= n;
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace advperr
