#pragma once

#include <vector>

#include <Eigen/Dense>

#include "advperr/sequences.hpp"

namespace advperr {

// Kalman state: (x, y, cos(theta), sin(theta), vx, vy, wc, ws) — constant
// velocity on position and on the orientation encoding, which is
// re-normalised to unit length after every predict/update.
struct Track {
  int track_id = 0;
  Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> covariance = Eigen::Matrix<double, 8, 8>::Identity();
  int missed_frames = 0;  // frames since last update
  double dt = 0.1;
  bool confirmed = false;
  // Ground-truth passthrough from the last associated detection.
  double speed = 0.0;
  double length = 4.5;
  double width = 2.0;

  double time_since_update() const { return missed_frames * dt; }
  Vec2 position() const { return {mean(0), mean(1)}; }
  double heading() const { return std::atan2(mean(3), mean(2)); }
  Vec2 velocity_estimate() const { return {mean(4), mean(5)}; }
};

struct TrackerParams {
  double association_threshold = 2.0;  // m, centre distance
  double max_coast_time = 1.0;         // s; deleted when strictly exceeded
  // Process noise standard deviations per sqrt(second).
  double q_pos = 0.5, q_ori = 0.1, q_vel = 1.0, q_ori_rate = 0.5;
  // Measurement noise standard deviations.
  double r_pos = 0.3, r_ori = 0.1;
  double init_vel_inflation = 10.0;
};

struct AssociationResult {
  std::vector<std::pair<int, int>> matches;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

// Hungarian association on centre distance; pairs beyond the threshold are
// rejected and reported unmatched on both sides.
AssociationResult associate(const std::vector<Track>& tracks,
                            const std::vector<Detection>& detections,
                            double threshold = 2.0);

class MultiObjectTracker {
 public:
  explicit MultiObjectTracker(TrackerParams params = {}) : params_(params) {}

  // Predict, associate, update, spawn, delete. Returns the confirmed tracks
  // after this frame's detections have been absorbed.
  std::vector<Track> step(const std::vector<Detection>& detections, double dt);

  const std::vector<Track>& tracks() const { return tracks_; }

 private:
  TrackerParams params_;
  std::vector<Track> tracks_;
  int next_id_ = 0;
};

}  // namespace advperr
