#include "advperr/tracker.hpp"

#include <stdexcept>

#include "advperr/assignment.hpp"

namespace advperr {

namespace {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat48 = Eigen::Matrix<double, 4, 8>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Vec4 = Eigen::Matrix<double, 4, 1>;

Mat8 transition(double dt) {
  Mat8 F = Mat8::Identity();
  for (int i = 0; i < 4; ++i) F(i, i + 4) = dt;
  return F;
}

Mat8 process_noise(const TrackerParams& p, double dt) {
  Vec8 q;
  q << p.q_pos, p.q_pos, p.q_ori, p.q_ori, p.q_vel, p.q_vel, p.q_ori_rate, p.q_ori_rate;
  return (q.array().square() * dt).matrix().asDiagonal();
}

Mat48 observation() {
  Mat48 H = Mat48::Zero();
  for (int i = 0; i < 4; ++i) H(i, i) = 1.0;
  return H;
}

Mat4 measurement_noise(const TrackerParams& p) {
  Vec4 r;
  r << p.r_pos, p.r_pos, p.r_ori, p.r_ori;
  return r.array().square().matrix().asDiagonal();
}

void renormalise_orientation(Track& t) {
  const double n = std::hypot(t.mean(2), t.mean(3));
  if (n > 1e-12) {
    t.mean(2) /= n;
    t.mean(3) /= n;
  } else {
    t.mean(2) = 1.0;
    t.mean(3) = 0.0;
  }
}

void apply_passthrough(Track& t, const Detection& d) {
  t.speed = d.speed;
  t.length = d.length;
  t.width = d.width;
}

}  // namespace

AssociationResult associate(const std::vector<Track>& tracks,
                            const std::vector<Detection>& detections, double threshold) {
  AssociationResult out;
  std::vector<std::vector<double>> cost(tracks.size(),
                                        std::vector<double>(detections.size(), kUnassignable));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (std::size_t j = 0; j < detections.size(); ++j) {
      const double d = (tracks[i].position() - detections[j].position).norm();
      if (d <= threshold) cost[i][j] = d;
    }
  }
  out.matches = min_cost_assignment(cost);
  std::vector<bool> track_used(tracks.size(), false), det_used(detections.size(), false);
  for (const auto& [ti, di] : out.matches) {
    track_used[ti] = true;
    det_used[di] = true;
  }
  for (std::size_t i = 0; i < tracks.size(); ++i)
    if (!track_used[i]) out.unmatched_tracks.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < detections.size(); ++j)
    if (!det_used[j]) out.unmatched_detections.push_back(static_cast<int>(j));
  return out;
}

std::vector<Track> MultiObjectTracker::step(const std::vector<Detection>& detections, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("tracker step: dt must be > 0");

  const Mat8 F = transition(dt);
  const Mat8 Q = process_noise(params_, dt);
  const Mat48 H = observation();
  const Mat4 R = measurement_noise(params_);

  // Predict.
  for (Track& t : tracks_) {
    t.mean = F * t.mean;
    t.covariance = F * t.covariance * F.transpose() + Q;
    t.covariance = 0.5 * (t.covariance + t.covariance.transpose()).eval();
    t.missed_frames += 1;
    t.dt = dt;
    renormalise_orientation(t);
  }

  const AssociationResult assoc = associate(tracks_, detections, params_.association_threshold);

  // Update matched tracks.
  for (const auto& [ti, di] : assoc.matches) {
    Track& t = tracks_[ti];
    const Detection& d = detections[di];
    Vec4 z;
    z << d.position.x, d.position.y, std::cos(d.heading), std::sin(d.heading);
    const Vec4 innovation = z - H * t.mean;
    const Mat4 S = H * t.covariance * H.transpose() + R;
    const Eigen::Matrix<double, 8, 4> K = t.covariance * H.transpose() * S.inverse();
    t.mean += K * innovation;
    const Mat8 IKH = Mat8::Identity() - K * H;
    // Joseph form keeps the covariance symmetric positive definite.
    t.covariance = IKH * t.covariance * IKH.transpose() + K * R * K.transpose();
    t.covariance = 0.5 * (t.covariance + t.covariance.transpose()).eval();
    t.missed_frames = 0;
    t.confirmed = true;  // confirmed after one observation
    renormalise_orientation(t);
    apply_passthrough(t, d);
  }

  // Spawn confirmed tracks for unmatched detections.
  for (const int di : assoc.unmatched_detections) {
    const Detection& d = detections[di];
    Track t;
    t.track_id = next_id_++;
    t.dt = dt;
    t.mean << d.position.x, d.position.y, std::cos(d.heading), std::sin(d.heading), 0.0, 0.0, 0.0,
        0.0;
    Vec8 p0;
    const double vp = params_.init_vel_inflation * params_.r_pos;
    const double vo = params_.init_vel_inflation * params_.r_ori;
    p0 << params_.r_pos, params_.r_pos, params_.r_ori, params_.r_ori, vp, vp, vo, vo;
    t.covariance = p0.array().square().matrix().asDiagonal();
    t.confirmed = true;
    t.missed_frames = 0;
    apply_passthrough(t, d);
    tracks_.push_back(t);
  }

  // Delete stale tracks: time_since_update strictly greater than the coast
  // window (so deletion lands in (1.0, 1.0 + dt] seconds).
  std::erase_if(tracks_, [&](const Track& t) {
    return t.missed_frames * dt > params_.max_coast_time;
  });

  std::vector<Track> confirmed;
  for (const Track& t : tracks_)
    if (t.confirmed) confirmed.push_back(t);
  return confirmed;
}

}  // namespace advperr
