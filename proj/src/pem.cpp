#include "advperr/pem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "advperr/rng.hpp"

namespace advperr {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kScaleFloor = 1e-6;  // m^2, degenerate-data floor
constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

// 2x2 SPD helpers.
struct Mat2 {
  double a, b, c;  // [[a, b], [b, c]]
  double det() const { return a * c - b * b; }
};

}  // namespace

double StudentT2::log_density(const Vec2& x) const {
  const Mat2 sigma{sxx, sxy, syy};
  const double det = sigma.det();
  const Vec2 d{x.x - location.x, x.y - location.y};
  const double quad = (d.x * (syy * d.x - sxy * d.y) + d.y * (sxx * d.y - sxy * d.x)) / det;
  const double p = 2.0;
  return std::lgamma(0.5 * (dof + p)) - std::lgamma(0.5 * dof) - 0.5 * p * std::log(dof * kPi) -
         0.5 * std::log(det) - 0.5 * (dof + p) * std::log1p(quad / dof);
}

Vec2 StudentT2::sample(Rng& rng) const {
  // Cholesky of the scale matrix.
  const double l11 = std::sqrt(sxx);
  const double l21 = sxy / l11;
  const double l22 = std::sqrt(std::max(syy - l21 * l21, 0.0));
  const double z1 = rng.normal(), z2 = rng.normal();
  const double w = rng.chi_squared(dof) / dof;
  const double scale = 1.0 / std::sqrt(std::max(w, 1e-300));
  return {location.x + (l11 * z1) * scale, location.y + (l21 * z1 + l22 * z2) * scale};
}

int PemModel::range_bin(double range) {
  if (range < kRangeEdges[0]) return 0;
  if (range < kRangeEdges[1]) return 1;
  return 2;
}

int PemModel::occlusion_bin(double occlusion) {
  if (occlusion < kOcclusionEdges[0]) return 0;
  if (occlusion < kOcclusionEdges[1]) return 1;
  return 2;
}

ArcSegment agent_arc(const Vec2& viewpoint, const AgentState& agent) {
  const auto corners = agent.box().corners();
  const Vec2 to_center = agent.position - viewpoint;
  const double ref = std::atan2(to_center.y, to_center.x);
  ArcSegment arc;
  arc.theta_lo = std::numeric_limits<double>::infinity();
  arc.theta_hi = -arc.theta_lo;
  for (const Vec2& c : corners) {
    const Vec2 d = c - viewpoint;
    // Unwrap each corner angle to within pi of the centre direction.
    const double theta = ref + wrap_angle(std::atan2(d.y, d.x) - ref);
    arc.theta_lo = std::min(arc.theta_lo, theta);
    arc.theta_hi = std::max(arc.theta_hi, theta);
  }
  arc.min_range = point_box_distance(viewpoint, agent.box());
  return arc;
}

namespace {

// Length of overlap of [lo, hi] with [lo2, hi2] on the circle.
double arc_overlap(double lo, double hi, double lo2, double hi2) {
  double best = 0.0;
  for (const double shift : {-2.0 * kPi, 0.0, 2.0 * kPi}) {
    const double o = std::min(hi, hi2 + shift) - std::max(lo, lo2 + shift);
    best = std::max(best, o);
  }
  return best;
}

}  // namespace

double occlusion_fraction(const Frame& frame, int agent_index) {
  if (agent_index < 0 || agent_index >= static_cast<int>(frame.agents.size()))
    throw std::out_of_range("occlusion_fraction: agent index out of range");
  const Vec2 viewpoint = frame.ego.position;
  const ArcSegment target = agent_arc(viewpoint, frame.agents[agent_index]);
  const double width = target.theta_hi - target.theta_lo;
  if (width <= 0.0) return 0.0;

  double best = 0.0;
  for (int j = 0; j < static_cast<int>(frame.agents.size()); ++j) {
    if (j == agent_index) continue;
    const ArcSegment other = agent_arc(viewpoint, frame.agents[j]);
    if (other.min_range >= target.min_range) continue;  // only strictly closer
    const double o = arc_overlap(target.theta_lo, target.theta_hi, other.theta_lo, other.theta_hi);
    best = std::max(best, o / width);
  }
  return std::min(best, 1.0);
}

namespace {

double student_t_total_ll(const std::vector<Vec2>& xs, const StudentT2& t) {
  double ll = 0.0;
  for (const Vec2& x : xs) ll += t.log_density(x);
  return ll;
}

// Profile maximisation of the dof by golden-section search on log(dof).
double optimise_dof(const std::vector<Vec2>& xs, StudentT2 t) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(2.05), hi = std::log(200.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  auto eval = [&](double logdof) {
    t.dof = std::exp(logdof);
    return student_t_total_ll(xs, t);
  };
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = eval(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = eval(x1);
    }
  }
  return std::exp(0.5 * (lo + hi));
}

// EM (ECME) maximum likelihood for the bivariate Student-T.
StudentT2 fit_student_t(const std::vector<Vec2>& xs) {
  StudentT2 t;
  if (xs.empty()) return t;
  const double n = static_cast<double>(xs.size());

  // Moment initialisation.
  Vec2 mean{0, 0};
  for (const Vec2& x : xs) mean = mean + x;
  mean = mean * (1.0 / n);
  double sxx = 0, sxy = 0, syy = 0;
  for (const Vec2& x : xs) {
    const Vec2 d = x - mean;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  t.location = mean;
  t.sxx = std::max(sxx / n, kScaleFloor);
  t.syy = std::max(syy / n, kScaleFloor);
  t.sxy = sxy / n;
  t.dof = 8.0;

  double prev_ll = student_t_total_ll(xs, t);
  for (int iter = 0; iter < 200; ++iter) {
    const double det = t.sxx * t.syy - t.sxy * t.sxy;
    double wsum = 0.0;
    Vec2 mu{0, 0};
    for (const Vec2& x : xs) {
      const Vec2 d = x - t.location;
      const double quad = (d.x * (t.syy * d.x - t.sxy * d.y) + d.y * (t.sxx * d.y - t.sxy * d.x)) / det;
      const double w = (t.dof + 2.0) / (t.dof + quad);
      wsum += w;
      mu = mu + x * w;
    }
    mu = mu * (1.0 / wsum);
    double nxx = 0, nxy = 0, nyy = 0;
    for (const Vec2& x : xs) {
      const Vec2 d = x - t.location;
      const double quad = (d.x * (t.syy * d.x - t.sxy * d.y) + d.y * (t.sxx * d.y - t.sxy * d.x)) / det;
      const double w = (t.dof + 2.0) / (t.dof + quad);
      const Vec2 dn = x - mu;
      nxx += w * dn.x * dn.x;
      nxy += w * dn.x * dn.y;
      nyy += w * dn.y * dn.y;
    }
    t.location = mu;
    t.sxx = std::max(nxx / n, kScaleFloor);
    t.syy = std::max(nyy / n, kScaleFloor);
    t.sxy = nxy / n;
    // Keep the scale matrix SPD.
    const double max_off = std::sqrt(t.sxx * t.syy) * (1.0 - 1e-9);
    t.sxy = std::clamp(t.sxy, -max_off, max_off);

    if (iter % 5 == 4) t.dof = optimise_dof(xs, t);

    const double ll = student_t_total_ll(xs, t);
    if (ll < prev_ll - 1e-6) break;  // numerical floor reached
    if (std::abs(ll - prev_ll) < 1e-9 * std::max(1.0, std::abs(prev_ll))) {
      prev_ll = ll;
      break;
    }
    prev_ll = ll;
  }
  t.dof = optimise_dof(xs, t);
  return t;
}

}  // namespace

PemModel fit(const PemDataset& data) {
  if (data.empty()) throw std::invalid_argument("pem fit: empty dataset");

  // Global fit (fallback for thin bins).
  long global_total = 0, global_det = 0;
  std::vector<Vec2> global_errors;
  for (const PemRow& r : data) {
    ++global_total;
    if (r.detected) {
      ++global_det;
      global_errors.push_back(r.error);
    }
  }
  PemBin global;
  global.p_det = global_total > 0 ? static_cast<double>(global_det) / global_total : 0.0;
  global.error = fit_student_t(global_errors);

  PemModel model;
  for (int b = 0; b < 9; ++b) {
    long total = 0, det = 0;
    std::vector<Vec2> errors;
    for (const PemRow& r : data) {
      if (PemModel::range_bin(r.range) * 3 + PemModel::occlusion_bin(r.occlusion) != b) continue;
      ++total;
      if (r.detected) {
        ++det;
        errors.push_back(r.error);
      }
    }
    PemBin& bin = model.bins[b];
    bin.p_det = total > 0 ? static_cast<double>(det) / total : global.p_det;
    bin.error = errors.size() >= 30 ? fit_student_t(errors) : global.error;
  }
  return model;
}

double log_likelihood(const PemModel& model, const GroundTruthSequence& y, const ErrorSequence& e) {
  if (y.duration() != e.duration() || y.agent_count() != e.agent_count())
    throw std::invalid_argument("pem log_likelihood: dimension mismatch");
  const long cells = static_cast<long>(y.duration()) * y.agent_count();
  if (cells == 0) return 0.0;

  double total = 0.0;
  for (int t = 0; t < y.duration(); ++t) {
    const Frame& frame = y.frames[t];
    for (int j = 0; j < y.agent_count(); ++j) {
      const double range = (frame.agents[j].position - frame.ego.position).norm();
      const double occ = occlusion_fraction(frame, j);
      const PemBin& bin = model.bin_for(range, occ);
      const AgentError& err = e.at(t, j);
      if (err.fn) {
        total += std::log(clamp_prob(1.0 - bin.p_det));
      } else {
        total += std::log(clamp_prob(bin.p_det)) + bin.error.log_density(err.dx);
      }
    }
  }
  return total / cells;
}

ErrorSequence sample_errors(const PemModel& model, const GroundTruthSequence& y,
                            std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x70656d73ULL));
  ErrorSequence e(y.duration(), y.agent_count());
  for (int t = 0; t < y.duration(); ++t) {
    const Frame& frame = y.frames[t];
    for (int j = 0; j < y.agent_count(); ++j) {
      const double range = (frame.agents[j].position - frame.ego.position).norm();
      const double occ = occlusion_fraction(frame, j);
      const PemBin& bin = model.bin_for(range, occ);
      if (!rng.bernoulli(bin.p_det)) {
        e.at(t, j).fn = true;
      } else {
        e.at(t, j).dx = bin.error.sample(rng);
      }
    }
  }
  return e;
}

PerceivedSequence sample(const PemModel& model, const GroundTruthSequence& y, std::uint64_t seed) {
  return apply_errors(y, sample_errors(model, y, seed));
}

PemModel preset_model(const std::string& preset) {
  PemModel m;
  auto set = [&](int rb, int ob, double p_det, double sigma2, double dof, double loc) {
    PemBin& b = m.bins[rb * 3 + ob];
    b.p_det = p_det;
    b.error = StudentT2{{loc, -loc}, sigma2, 0.2 * sigma2, sigma2, dof};
  };
  if (preset == "clean") {
    for (int rb = 0; rb < 3; ++rb)
      for (int ob = 0; ob < 3; ++ob) set(rb, ob, 0.999, 1e-4, 50.0, 0.0);
  } else if (preset == "moderate") {
    const double pd[3][3] = {{0.97, 0.92, 0.85}, {0.94, 0.88, 0.8}, {0.9, 0.82, 0.72}};
    const double s2[3][3] = {{0.04, 0.06, 0.1}, {0.08, 0.12, 0.18}, {0.15, 0.2, 0.3}};
    for (int rb = 0; rb < 3; ++rb)
      for (int ob = 0; ob < 3; ++ob) set(rb, ob, pd[rb][ob], s2[rb][ob], 6.0, 0.03);
  } else if (preset == "noisy") {
    const double pd[3][3] = {{0.9, 0.78, 0.62}, {0.82, 0.68, 0.52}, {0.72, 0.58, 0.42}};
    const double s2[3][3] = {{0.2, 0.3, 0.45}, {0.35, 0.5, 0.7}, {0.55, 0.75, 1.0}};
    for (int rb = 0; rb < 3; ++rb)
      for (int ob = 0; ob < 3; ++ob) set(rb, ob, pd[rb][ob], s2[rb][ob], 3.5, 0.08);
  } else {
    throw std::invalid_argument("unknown synth-log preset: " + preset);
  }
  return m;
}

PemModel default_model() {
  // Tuned so the bundled stack passes the 100-sample safety gate.
  PemModel m;
  const double pd[3][3] = {{0.99, 0.96, 0.92}, {0.97, 0.94, 0.9}, {0.94, 0.91, 0.87}};
  const double s2[3][3] = {{0.04, 0.06, 0.09}, {0.06, 0.09, 0.12}, {0.09, 0.12, 0.16}};
  for (int rb = 0; rb < 3; ++rb)
    for (int ob = 0; ob < 3; ++ob) {
      PemBin& b = m.bins[rb * 3 + ob];
      b.p_det = pd[rb][ob];
      b.error = StudentT2{{0.0, 0.0}, s2[rb][ob], 0.0, s2[rb][ob], 6.0};
    }
  return m;
}

PemDataset synth_logs(const SynthLogConfig& config, std::uint64_t seed) {
  const PemModel gen = preset_model(config.preset);
  Rng rng(derive_seed(seed, 0x73796e74ULL));
  PemDataset data;
  data.reserve(config.rows);
  for (long i = 0; i < config.rows; ++i) {
    PemRow row;
    row.range = rng.uniform(1.0, 55.0);
    row.occlusion = rng.uniform(0.0, 1.0);
    const PemBin& bin = gen.bin_for(row.range, row.occlusion);
    row.detected = rng.bernoulli(bin.p_det);
    if (row.detected) row.error = bin.error.sample(rng);
    data.push_back(row);
  }
  return data;
}

std::string pem_model_to_json(const PemModel& m) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["range_edges"] = kRangeEdges;
  j["occlusion_edges"] = kOcclusionEdges;
  j["bins"] = nlohmann::json::array();
  for (const PemBin& b : m.bins) {
    j["bins"].push_back({{"p_det", b.p_det},
                         {"location", {b.error.location.x, b.error.location.y}},
                         {"scale", {b.error.sxx, b.error.sxy, b.error.syy}},
                         {"dof", b.error.dof}});
  }
  return j.dump(2) + "\n";
}

PemModel pem_model_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != kSchemaVersion)
    throw std::runtime_error("pem model: unsupported schema version");
  PemModel m;
  const auto& bins = j.at("bins");
  if (bins.size() != 9) throw std::runtime_error("pem model: expected 9 bins");
  for (int i = 0; i < 9; ++i) {
    const auto& jb = bins[i];
    PemBin& b = m.bins[i];
    b.p_det = jb.at("p_det").get<double>();
    b.error.location = {jb.at("location")[0].get<double>(), jb.at("location")[1].get<double>()};
    b.error.sxx = jb.at("scale")[0].get<double>();
    b.error.sxy = jb.at("scale")[1].get<double>();
    b.error.syy = jb.at("scale")[2].get<double>();
    b.error.dof = jb.at("dof").get<double>();
    if (b.p_det < 0.0 || b.p_det > 1.0 || b.error.dof <= 2.0 ||
        b.error.sxx * b.error.syy - b.error.sxy * b.error.sxy <= 0.0)
      throw std::runtime_error("pem model: invalid bin parameters");
  }
  return m;
}

void save_pem_model(const PemModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pem model: " + path);
  out << pem_model_to_json(m);
}

PemModel load_pem_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pem model: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return pem_model_from_json(ss.str());
}

std::string pem_dataset_to_csv(const PemDataset& data) {
  std::ostringstream out;
  out << "range,occlusion,detected,err_x,err_y\n";
  char buf[128];
  for (const PemRow& r : data) {
    if (r.detected) {
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,1,%.9g,%.9g\n", r.range, r.occlusion, r.error.x,
                    r.error.y);
    } else {
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,0,,\n", r.range, r.occlusion);
    }
    out << buf;
  }
  return out.str();
}

PemDataset pem_dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("pem dataset: empty file");
  PemDataset data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    PemRow r;
    std::getline(ls, cell, ',');
    r.range = std::stod(cell);
    std::getline(ls, cell, ',');
    r.occlusion = std::stod(cell);
    std::getline(ls, cell, ',');
    r.detected = cell == "1";
    if (std::getline(ls, cell, ',') && !cell.empty()) r.error.x = std::stod(cell);
    if (std::getline(ls, cell, ',') && !cell.empty()) r.error.y = std::stod(cell);
    data.push_back(r);
  }
  return data;
}

}  // namespace advperr
