#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advperr/errors.hpp"
#include "advperr/sequences.hpp"

namespace advperr {

// Bivariate Student-T parameters (location, SPD scale matrix, dof > 2).
struct StudentT2 {
  Vec2 location;
  double sxx = 0.09, sxy = 0.0, syy = 0.09;  // scale matrix, m^2
  double dof = 8.0;

  double log_density(const Vec2& x) const;
  Vec2 sample(class Rng& rng) const;
};

struct PemBin {
  double p_det = 0.95;
  StudentT2 error;
};

// Range bins {0-20, 20-40, 40+} m x occlusion bins {0-0.25, 0.25-0.75, 0.75-1}.
inline constexpr std::array<double, 2> kRangeEdges = {20.0, 40.0};
inline constexpr std::array<double, 2> kOcclusionEdges = {0.25, 0.75};

struct PemModel {
  std::array<PemBin, 9> bins;  // row-major: range bin * 3 + occlusion bin

  static int range_bin(double range);
  static int occlusion_bin(double occlusion);
  const PemBin& bin_for(double range, double occlusion) const {
    return bins[range_bin(range) * 3 + occlusion_bin(occlusion)];
  }
  PemBin& bin_for(double range, double occlusion) {
    return bins[range_bin(range) * 3 + occlusion_bin(occlusion)];
  }
};

struct PemRow {
  double range = 0.0;
  double occlusion = 0.0;
  bool detected = false;
  Vec2 error;  // meaningful iff detected
};

using PemDataset = std::vector<PemRow>;

// Low-fidelity pseudo occlusion: each agent becomes an arc segment at its
// minimum range from ego; the returned value is the largest fraction of the
// agent's arc covered by any single strictly-closer agent's arc.
double occlusion_fraction(const Frame& frame, int agent_index);

// Arc of an agent as seen from a viewpoint: [theta_lo, theta_hi] (theta_hi >=
// theta_lo, may exceed pi after unwrapping) and minimum range. Exposed for
// tests.
struct ArcSegment {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double min_range = 0.0;
};
ArcSegment agent_arc(const Vec2& viewpoint, const AgentState& agent);

// Per-bin maximum likelihood: detection frequency for p_det, EM for the
// Student-T. Bins with fewer than 30 detected rows fall back to the global
// fit.
PemModel fit(const PemDataset& data);

// Mean per-agent-frame log-likelihood of the attack under the model: dropped
// frames contribute log(1 - p_det), surviving detections log(p_det) plus the
// Student-T log-density of dx. Bins come from ground-truth range/occlusion.
double log_likelihood(const PemModel& model, const GroundTruthSequence& y, const ErrorSequence& e);

// Draws a perception sample: Bernoulli existence and Student-T position
// noise per agent-frame (dphi = 0). Returned as an error sequence so it can
// be fed straight into a rollout; apply_errors gives the PerceivedSequence.
ErrorSequence sample_errors(const PemModel& model, const GroundTruthSequence& y, std::uint64_t seed);
PerceivedSequence sample(const PemModel& model, const GroundTruthSequence& y, std::uint64_t seed);

struct SynthLogConfig {
  std::string preset = "moderate";  // clean | moderate | noisy
  long rows = 100000;
};

// Synthetic detector-log generator: range/occlusion-dependent dropout with
// heavy-tailed position errors. Replaces real detector logs at desk scale.
PemDataset synth_logs(const SynthLogConfig& config, std::uint64_t seed);

// The generating model behind a preset (for self-consistency checks).
PemModel preset_model(const std::string& preset);

// Tuned default used by the safety gate and attack likelihood scoring.
PemModel default_model();

std::string pem_model_to_json(const PemModel& m);
PemModel pem_model_from_json(const std::string& text);
void save_pem_model(const PemModel& m, const std::string& path);
PemModel load_pem_model(const std::string& path);

std::string pem_dataset_to_csv(const PemDataset& data);
PemDataset pem_dataset_from_csv(const std::string& text);

}  // namespace advperr
