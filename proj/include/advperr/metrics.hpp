#pragma once

#include <array>
#include <string>
#include <vector>

#include "advperr/sequences.hpp"

namespace advperr {

// Centre-distance thresholds of the detection protocol: the four AP
// thresholds, with the 2 m one also used for true-positive error metrics.
inline constexpr std::array<double, 4> kApThresholds = {0.5, 1.0, 2.0, 4.0};
inline constexpr double kTpThreshold = 2.0;

struct ThresholdCounts {
  long tp = 0;
  long fn = 0;
  long fp = 0;
};

struct MatchResult {
  std::array<ThresholdCounts, 4> per_threshold;
  // True-positive errors at the 2 m threshold, aggregated over the sequence.
  std::vector<double> tp_position_errors;     // m
  std::vector<double> tp_orientation_errors;  // rad, absolute
  // presence[agent][frame]: matched at the 2 m threshold.
  std::vector<std::vector<bool>> presence;
  int duration = 0;
};

struct MetricReport {
  double nds = 0.0;
  double nds_t = 0.0;
  double map = 0.0;
  double ate = 0.0;  // m
  double aoe = 0.0;  // rad
  double longest_drop_fraction = 0.0;
  long tp = 0;  // at the 2 m threshold
  long fn = 0;
};

// Per-frame minimum-cost matching between ground-truth agents and
// detections, per threshold; single class.
MatchResult match(const GroundTruthSequence& y, const PerceivedSequence& y_hat);

double longest_drop_fraction(const MatchResult& m);

MetricReport metric_report(const GroundTruthSequence& y, const PerceivedSequence& y_hat);

double nds(const GroundTruthSequence& y, const PerceivedSequence& y_hat);
double nds_t(const GroundTruthSequence& y, const PerceivedSequence& y_hat);

std::string metric_report_to_json(const MetricReport& r);

}  // namespace advperr
