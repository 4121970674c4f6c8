#include "advperr/errors.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "advperr/rng.hpp"

namespace advperr {

int ErrorSequence::fn_count() const {
  int n = 0;
  for (const AgentError& a : grid_) n += a.fn ? 1 : 0;
  return n;
}

PerceivedSequence apply_errors(const GroundTruthSequence& y, const ErrorSequence& e) {
  if (y.duration() != e.duration() || y.agent_count() != e.agent_count())
    throw std::invalid_argument("apply_errors: error grid does not match sequence dimensions");

  PerceivedSequence out;
  out.frames.resize(y.frames.size());
  for (int t = 0; t < y.duration(); ++t) {
    const Frame& frame = y.frames[t];
    for (int j = 0; j < y.agent_count(); ++j) {
      const AgentError& err = e.at(t, j);
      if (err.fn) continue;
      const AgentState& truth = frame.agents[j];
      Detection d;
      d.position = truth.position + err.dx;
      d.heading = wrap_angle(truth.heading + err.dphi);
      d.speed = truth.speed;
      d.length = truth.length;
      d.width = truth.width;
      d.source_agent_id = truth.agent_id;
      out.frames[t].push_back(d);
    }
  }
  return out;
}

ErrorSequence full_drop_error(int agent_index, int duration, int agents) {
  return segment_drop_error(agent_index, 0, duration - 1, duration, agents);
}

ErrorSequence segment_drop_error(int agent_index, int t1, int t2, int duration, int agents) {
  if (agent_index < 0 || agent_index >= agents)
    throw std::out_of_range("segment_drop_error: agent index out of range");
  if (t1 < 0 || t1 > t2 || t2 >= duration)
    throw std::invalid_argument("segment_drop_error: invalid frame interval");
  ErrorSequence e(duration, agents);
  for (int t = t1; t <= t2; ++t) e.at(t, agent_index).fn = true;
  return e;
}

ErrorSequence perturb(const ErrorSequence& e, double strength, std::uint64_t seed) {
  if (strength < 0.0 || strength > 1.0)
    throw std::invalid_argument("perturb: strength must be in [0, 1]");
  ErrorSequence out = e;
  if (strength == 0.0) return out;
  Rng rng(derive_seed(seed, 0x70657274ULL));
  for (int t = 0; t < out.duration(); ++t) {
    for (int j = 0; j < out.agent_count(); ++j) {
      AgentError& a = out.at(t, j);
      if (rng.bernoulli(strength)) a.fn = !a.fn;
      if (!a.fn) {
        a.dx.x += rng.normal(0.0, strength);
        a.dx.y += rng.normal(0.0, strength);
      }
    }
  }
  return out;
}

namespace {
std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string error_sequence_to_text(const ErrorSequence& e, std::uint64_t scenario_hash) {
  std::ostringstream out;
  out << "advperr-errors v" << kSchemaVersion << " scenario_hash=" << scenario_hash
      << " T=" << e.duration() << " d=" << e.agent_count() << "\n";
  for (int j = 0; j < e.agent_count(); ++j) {
    out << "agent " << j << "\n";
    const char* names[3] = {"dx_x", "dx_y", "dphi"};
    for (int k = 0; k < 3; ++k) {
      out << names[k];
      for (int t = 0; t < e.duration(); ++t) {
        const AgentError& a = e.at(t, j);
        const double v = k == 0 ? a.dx.x : (k == 1 ? a.dx.y : a.dphi);
        out << ' ' << fmt_double(v);
      }
      out << "\n";
    }
    out << "fn";
    for (int t = 0; t < e.duration(); ++t) out << ' ' << (e.at(t, j).fn ? 1 : 0);
    out << "\n";
  }
  return out.str();
}

ErrorSequence error_sequence_from_text(const std::string& text, std::uint64_t* scenario_hash) {
  std::istringstream in(text);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "advperr-errors") throw std::runtime_error("error file: bad magic");
  std::uint64_t hash = 0;
  int duration = -1, agents = -1;
  std::string tok;
  while (in >> tok && tok.find('=') != std::string::npos) {
    const auto pos = tok.find('=');
    const std::string key = tok.substr(0, pos), val = tok.substr(pos + 1);
    if (key == "scenario_hash") hash = std::stoull(val);
    else if (key == "T") duration = std::stoi(val);
    else if (key == "d") agents = std::stoi(val);
    if (key == "d") break;
  }
  if (duration < 0 || agents < 0) throw std::runtime_error("error file: missing T/d header");
  ErrorSequence e(duration, agents);
  for (int j = 0; j < agents; ++j) {
    std::string kw;
    int idx;
    in >> kw >> idx;
    if (kw != "agent" || idx != j) throw std::runtime_error("error file: malformed agent block");
    for (int k = 0; k < 4; ++k) {
      std::string name;
      in >> name;
      for (int t = 0; t < duration; ++t) {
        AgentError& a = e.at(t, j);
        if (name == "dx_x") in >> a.dx.x;
        else if (name == "dx_y") in >> a.dx.y;
        else if (name == "dphi") in >> a.dphi;
        else if (name == "fn") {
          int f;
          in >> f;
          a.fn = f != 0;
        } else {
          throw std::runtime_error("error file: unknown column '" + name + "'");
        }
      }
    }
  }
  if (!in) throw std::runtime_error("error file: truncated");
  if (scenario_hash) *scenario_hash = hash;
  return e;
}

void save_error_sequence(const ErrorSequence& e, std::uint64_t scenario_hash,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write error file: " + path);
  out << error_sequence_to_text(e, scenario_hash);
}

ErrorSequence load_error_sequence(const std::string& path, std::uint64_t* scenario_hash) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open error file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return error_sequence_from_text(ss.str(), scenario_hash);
}

}  // namespace advperr
