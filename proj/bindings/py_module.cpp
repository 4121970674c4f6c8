#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>

#include "advperr/cli.hpp"
#include "advperr/render.hpp"
#include "advperr/search.hpp"

namespace py = pybind11;
using namespace advperr;

namespace {

// The bindings mirror the CLI surface: load, roll out, score, attack, probe.
// Rich per-frame data goes through plain Python containers rather than
// bespoke wrapper types so downstream analysis stays numpy/pandas friendly.

py::dict report_dict(const MetricReport& r) {
  py::dict d;
  d["nds"] = r.nds;
  d["nds_t"] = r.nds_t;
  d["map"] = r.map;
  d["ate"] = r.ate;
  d["aoe"] = r.aoe;
  d["longest_drop_fraction"] = r.longest_drop_fraction;
  d["tp"] = r.tp;
  d["fn"] = r.fn;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic driving simulator and adversarial perception error search";

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init<double, double>())
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("__repr__",
           [](const Vec2& v) { return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")"; });

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("scenario_id", &Scenario::scenario_id)
      .def_readonly("duration_T", &Scenario::duration_T)
      .def_readonly("dt", &Scenario::dt)
      .def_readonly("planner_kind", &Scenario::planner_kind)
      .def_property_readonly("agent_count", &Scenario::agent_count);

  py::class_<AgentError>(m, "AgentError")
      .def(py::init<>())
      .def_readwrite("dx", &AgentError::dx)
      .def_readwrite("dphi", &AgentError::dphi)
      .def_readwrite("fn", &AgentError::fn);

  py::class_<ErrorSequence>(m, "ErrorSequence")
      .def(py::init<int, int>(), py::arg("duration"), py::arg("agents"))
      .def_property_readonly("duration", &ErrorSequence::duration)
      .def_property_readonly("agent_count", &ErrorSequence::agent_count)
      .def("fn_count", &ErrorSequence::fn_count)
      .def("at", [](const ErrorSequence& e, int t, int j) { return e.at(t, j); })
      .def("set",
           [](ErrorSequence& e, int t, int j, const AgentError& v) { e.at(t, j) = v; })
      .def("__eq__", [](const ErrorSequence& a, const ErrorSequence& b) { return a == b; });

  py::class_<Detection>(m, "Detection")
      .def_readonly("position", &Detection::position)
      .def_readonly("heading", &Detection::heading)
      .def_readonly("speed", &Detection::speed);

  py::class_<AgentState>(m, "AgentState")
      .def_readonly("agent_id", &AgentState::agent_id)
      .def_readonly("position", &AgentState::position)
      .def_readonly("heading", &AgentState::heading)
      .def_readonly("speed", &AgentState::speed);

  py::class_<PerceivedSequence>(m, "PerceivedSequence")
      .def("__len__", [](const PerceivedSequence& p) { return p.frames.size(); })
      .def("frame", [](const PerceivedSequence& p, int t) { return p.frames.at(t); });

  py::class_<GroundTruthSequence>(m, "GroundTruthSequence")
      .def("__len__", [](const GroundTruthSequence& g) { return g.frames.size(); });

  py::class_<Rollout>(m, "Rollout")
      .def_readonly("rule_value", &Rollout::rule_value)
      .def_readonly("frame_min_separation", &Rollout::frame_min_separation)
      .def_readonly("perceived", &Rollout::perceived)
      .def_property_readonly("ego_trajectory",
                             [](const Rollout& r) { return r.ego_trajectory; });

  py::class_<PemModel>(m, "PemModel");

  m.def("load_scenario", [](const std::string& p) { return load_scenario(resolve_scenario_path(p)); },
        py::arg("name_or_path"));
  m.def("scenario_hash", &scenario_hash);
  m.def("bundled_scenarios", &bundled_scenario_names);

  m.def("rollout", &rollout, py::arg("scenario"), py::arg("errors"));
  m.def("generate_ground_truth", &generate_ground_truth);
  m.def("apply_errors", &apply_errors);
  m.def("full_drop_error", &full_drop_error);
  m.def("segment_drop_error", &segment_drop_error);
  m.def("load_error_sequence",
        [](const std::string& p) { return load_error_sequence(p, nullptr); });
  m.def("save_error_sequence",
        [](const ErrorSequence& e, std::uint64_t hash, const std::string& p) {
          save_error_sequence(e, hash, p);
        });

  m.def("metric_report", [](const GroundTruthSequence& y, const PerceivedSequence& yh) {
    return report_dict(metric_report(y, yh));
  });
  m.def("nds", &nds);
  m.def("nds_t", &nds_t);

  m.def("default_pem", &default_model);
  m.def("load_pem_model", &load_pem_model);
  m.def("pem_log_likelihood", &log_likelihood);
  m.def("sample_errors", &sample_errors, py::arg("model"), py::arg("ground_truth"), py::arg("seed"));

  m.def("heuristic_search", [](const Scenario& s) {
    const HeuristicResult r = heuristic_search(s);
    py::dict d;
    d["status"] = r.status;
    d["influential_agents"] = r.influential_agents;
    d["rollout_count"] = r.rollout_count;
    d["attacks"] = r.attacks;
    return d;
  });
  m.def("random_search",
        [](const Scenario& s, const ErrorSequence& e0, const std::string& metric,
           const PemModel& pem, std::uint64_t seed) {
          const AttackResult r = random_search(s, e0, objective_from_string(metric), pem, seed);
          py::dict d;
          d["best_alpha"] = r.best_alpha;
          d["best_error"] = r.best_error;
          d["rollout_count"] = r.rollout_count;
          py::list trace;
          for (const TraceEntry& t : r.trace) {
            py::dict e;
            e["rollout_index"] = t.rollout_index;
            e["alpha"] = t.alpha;
            e["rule_value"] = t.rule_value;
            e["nds"] = t.metrics.nds;
            e["nds_t"] = t.metrics.nds_t;
            e["pem_ll"] = t.pem_ll;
            trace.append(e);
          }
          d["trace"] = trace;
          return d;
        },
        py::arg("scenario"), py::arg("init"), py::arg("metric"), py::arg("pem"), py::arg("seed"));
  m.def("robustness_probe",
        [](const Scenario& s, const ErrorSequence& e, const std::vector<double>& strengths, int n,
           std::uint64_t seed) {
          py::list out;
          for (const ProbePoint& p : robustness_probe(s, e, strengths, n, seed)) {
            py::dict d;
            d["strength"] = p.strength;
            d["adversarial_fraction"] = p.adversarial_fraction;
            d["mean_nds"] = p.mean_nds;
            d["mean_nds_t"] = p.mean_nds_t;
            out.append(d);
          }
          return out;
        },
        py::arg("scenario"), py::arg("errors"), py::arg("strengths"), py::arg("n"), py::arg("seed"));

  m.def("cli_main",
        [](const std::vector<std::string>& args) { return cli_run(args, std::cout, std::cerr); });
}
