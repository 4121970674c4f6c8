#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "advperr/errors.hpp"
#include "advperr/metrics.hpp"
#include "advperr/rng.hpp"
#include "advperr/world.hpp"
#include "test_util.hpp"

using namespace advperr;
using testutil::bundled;

namespace {

GroundTruthSequence scene(const std::vector<std::vector<Vec2>>& frames_positions) {
  GroundTruthSequence y;
  for (std::size_t t = 0; t < frames_positions.size(); ++t) {
    Frame f;
    f.timestamp = 0.1 * t;
    for (std::size_t j = 0; j < frames_positions[t].size(); ++j) {
      AgentState a;
      a.agent_id = static_cast<int>(j);
      a.position = frames_positions[t][j];
      f.agents.push_back(a);
    }
    y.frames.push_back(f);
  }
  return y;
}

}  // namespace

TEST_CASE("identity: all TP at every threshold") {
  const GroundTruthSequence y = scene({{{0, 0}, {10, 0}}, {{1, 0}, {11, 0}}});
  const MatchResult m = match(y, apply_errors(y, ErrorSequence(2, 2)));
  for (const ThresholdCounts& c : m.per_threshold) {
    CHECK(c.tp == 4);
    CHECK(c.fn == 0);
    CHECK(c.fp == 0);
  }
  CHECK(metric_report(y, apply_errors(y, ErrorSequence(2, 2))).nds == 1.0);
}

TEST_CASE("1.5 m displacement: FN below 2 m thresholds only") {
  const GroundTruthSequence y = scene({{{0, 0}}});
  ErrorSequence e(1, 1);
  e.at(0, 0).dx = {1.5, 0.0};
  const MatchResult m = match(y, apply_errors(y, e));
  CHECK(m.per_threshold[0].tp == 0);  // 0.5 m
  CHECK(m.per_threshold[0].fn == 1);
  CHECK(m.per_threshold[1].tp == 0);  // 1 m
  CHECK(m.per_threshold[2].tp == 1);  // 2 m
  CHECK(m.per_threshold[3].tp == 1);  // 4 m
  REQUIRE(m.tp_position_errors.size() == 1);
  CHECK(m.tp_position_errors[0] == doctest::Approx(1.5));
}

TEST_CASE("matching equals exhaustive minimum-cost oracle on random small scenes") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_int(4));
    std::vector<Vec2> pos;
    for (int j = 0; j < d; ++j) pos.push_back({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)});
    const GroundTruthSequence y = scene({pos});
    ErrorSequence e(1, d);
    for (int j = 0; j < d; ++j) {
      e.at(0, j).fn = rng.bernoulli(0.25);
      e.at(0, j).dx = {rng.normal(0.0, 1.5), rng.normal(0.0, 1.5)};
    }
    const PerceivedSequence p = apply_errors(y, e);
    const MatchResult m = match(y, p);

    // Oracle at the 2 m threshold: max matches, then min total distance.
    const int n = static_cast<int>(p.frames[0].size());
    std::vector<int> det_idx(n);
    std::iota(det_idx.begin(), det_idx.end(), 0);
    int best_count = -1;
    double best_cost = 0.0;
    std::vector<int> assign(d);
    std::iota(assign.begin(), assign.end(), 0);
    do {
      int count = 0;
      double cost = 0.0;
      for (int j = 0; j < d; ++j) {
        if (assign[j] >= n) continue;
        const double dist = (pos[j] - p.frames[0][assign[j]].position).norm();
        if (dist > 2.0) continue;
        ++count;
        cost += dist;
      }
      if (count > best_count || (count == best_count && cost < best_cost - 1e-12)) {
        best_count = count;
        best_cost = cost;
      }
    } while (std::next_permutation(assign.begin(), assign.end()));
    CHECK(m.per_threshold[2].tp == best_count);
    const double got =
        std::accumulate(m.tp_position_errors.begin(), m.tp_position_errors.end(), 0.0);
    CHECK(got == doctest::Approx(best_cost).epsilon(1e-9));
  }
}

TEST_CASE("nds hand evaluation: mAP 0.8, ATE 0.2, AOE 0.1 -> 0.87") {
  // One frame, five agents: one dropped (recall 0.8 at every threshold), the
  // other four shifted 0.2 m and rotated 0.1 rad.
  const GroundTruthSequence y = scene({{{0, 0}, {10, 0}, {20, 0}, {30, 0}, {40, 0}}});
  ErrorSequence e(1, 5);
  e.at(0, 4).fn = true;
  for (int j = 0; j < 4; ++j) {
    e.at(0, j).dx = {0.2, 0.0};
    e.at(0, j).dphi = 0.1;
  }
  const MetricReport r = metric_report(y, apply_errors(y, e));
  CHECK(r.map == doctest::Approx(0.8));
  CHECK(r.ate == doctest::Approx(0.2));
  CHECK(r.aoe == doctest::Approx(0.1));
  CHECK(r.nds == doctest::Approx((5 * 0.8 + (1 - 0.2) + (1 - 0.1) + 3) / 10.0));
  // The dropped agent is absent for the whole (single-frame) duration.
  CHECK(r.longest_drop_fraction == doctest::Approx(1.0));
}

TEST_CASE("all detections dropped -> NDS floor of 0.3") {
  const GroundTruthSequence y = scene({{{0, 0}}, {{1, 0}}});
  const MetricReport r = metric_report(y, apply_errors(y, full_drop_error(0, 2, 1)));
  CHECK(r.map == 0.0);
  CHECK(r.nds == doctest::Approx(0.3));
  CHECK(r.longest_drop_fraction == doctest::Approx(1.0));
  CHECK(r.nds_t == doctest::Approx(0.15));
}

TEST_CASE("longest drop fraction run-length cases") {
  std::vector<std::vector<Vec2>> frames(20, {{0, 0}});
  const GroundTruthSequence y = scene(frames);
  SUBCASE("no FNs") {
    CHECK(longest_drop_fraction(match(y, apply_errors(y, ErrorSequence(20, 1)))) == 0.0);
  }
  SUBCASE("drops at {3,4,5} and {9} of 20") {
    ErrorSequence e(20, 1);
    for (int t : {3, 4, 5, 9}) e.at(t, 0).fn = true;
    CHECK(longest_drop_fraction(match(y, apply_errors(y, e))) == doctest::Approx(0.15));
  }
  SUBCASE("all dropped") {
    CHECK(longest_drop_fraction(match(y, apply_errors(y, full_drop_error(0, 20, 1)))) == 1.0);
  }
}

TEST_CASE("nds_t formula and bound") {
  std::vector<std::vector<Vec2>> frames(10, {{0, 0}});
  const GroundTruthSequence y = scene(frames);
  ErrorSequence e(10, 1);
  for (int t = 0; t < 5; ++t) e.at(t, 0).fn = true;
  const MetricReport r = metric_report(y, apply_errors(y, e));
  CHECK(r.nds_t == doctest::Approx((r.nds + (1.0 - 0.5)) / 2.0));
  CHECK(r.nds_t >= r.nds / 2.0 - 1e-12);
}

TEST_CASE("metrics stay in [0, 1] on random inputs") {
  Rng rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const int T = 2 + static_cast<int>(rng.uniform_int(8));
    const int d = 1 + static_cast<int>(rng.uniform_int(3));
    std::vector<std::vector<Vec2>> frames(T, std::vector<Vec2>(d));
    for (auto& f : frames)
      for (Vec2& p : f) p = {rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
    const GroundTruthSequence y = scene(frames);
    ErrorSequence e(T, d);
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < d; ++j) {
        e.at(t, j).fn = rng.bernoulli(0.3);
        e.at(t, j).dx = {rng.normal(0.0, 2.0), rng.normal(0.0, 2.0)};
        e.at(t, j).dphi = rng.normal(0.0, 0.5);
      }
    const MetricReport r = metric_report(y, apply_errors(y, e));
    for (double v : {r.map, r.nds, r.nds_t, r.longest_drop_fraction}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("LDF monotonicity: adding an FN never decreases it") {
  std::vector<std::vector<Vec2>> frames(15, {{0, 0}});
  const GroundTruthSequence y = scene(frames);
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    ErrorSequence e(15, 1);
    for (int t = 0; t < 15; ++t) e.at(t, 0).fn = rng.bernoulli(0.3);
    const double base = longest_drop_fraction(match(y, apply_errors(y, e)));
    const int extra = static_cast<int>(rng.uniform_int(15));
    ErrorSequence more = e;
    more.at(extra, 0).fn = true;
    CHECK(longest_drop_fraction(match(y, apply_errors(y, more))) >= base - 1e-12);
  }
}

TEST_CASE("NDS-t penalises contiguity for a fixed FN count") {
  std::vector<std::vector<Vec2>> frames(20, {{0, 0}});
  const GroundTruthSequence y = scene(frames);
  ErrorSequence contiguous(20, 1), flicker(20, 1);
  for (int t = 5; t < 11; ++t) contiguous.at(t, 0).fn = true;
  for (int t : {2, 5, 8, 11, 14, 17}) flicker.at(t, 0).fn = true;
  const double a = metric_report(y, apply_errors(y, contiguous)).nds_t;
  const double b = metric_report(y, apply_errors(y, flicker)).nds_t;
  CHECK(a <= b);
}

TEST_CASE("m(y, y) = 1 on every bundled scenario") {
  for (const char* name : {"lane_follow", "overtake_follow", "overtake", "left_turn", "right_turn"}) {
    const Scenario s = bundled(name);
    const GroundTruthSequence y = generate_ground_truth(s);
    CHECK(nds(y, apply_errors(y, ErrorSequence(s.duration_T, s.agent_count()))) == 1.0);
    CHECK(nds_t(y, apply_errors(y, ErrorSequence(s.duration_T, s.agent_count()))) == 1.0);
  }
}
