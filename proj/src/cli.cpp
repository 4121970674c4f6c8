#include "advperr/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "advperr/render.hpp"
#include "advperr/rng.hpp"
#include "advperr/search.hpp"

namespace advperr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Outputs never overwrite without an explicit flag.
void prepare_outdir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir) && !force)
    throw std::runtime_error("output directory " + dir.string() +
                             " is not empty (use --force to overwrite)");
  fs::create_directories(dir);
}

std::string default_out_root() {
  const char* env = std::getenv("ADVPERR_OUT_ROOT");
  return env ? env : "advperr_out";
}

double clip_sentinel(double v) {
  if (std::isinf(v)) return v > 0 ? kNoAgentSentinel : -kNoAgentSentinel;
  return v;
}

std::string trace_to_csv(const AttackResult& result) {
  std::ostringstream out;
  out << "rollout_index,alpha,rule_value,nds,nds_t,pem_ll\n";
  for (const TraceEntry& t : result.trace) {
    out << t.rollout_index << ',' << num(t.alpha) << ',' << num(t.rule_value) << ','
        << num(t.metrics.nds) << ',' << num(t.metrics.nds_t) << ',' << num(t.pem_ll) << '\n';
  }
  return out.str();
}

PemModel load_model_or_default(const std::string& path) {
  return path.empty() ? default_model() : load_pem_model(path);
}

struct Cmd {
  std::string scenario, errors_file, out_dir, metric = "nds-t", model_file, data_file;
  std::string preset = "moderate", input_file;
  std::uint64_t seed = 0;
  long rows = 100000;
  int count = 100, n = 10, every = 10;
  bool force = false, check_rule = false;
  std::string strengths = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
};

json config_echo(const std::string& command, const Cmd& c) {
  json j;
  j["command"] = command;
  j["scenario"] = c.scenario;
  if (!c.errors_file.empty()) j["errors"] = c.errors_file;
  if (!c.metric.empty()) j["metric"] = c.metric;
  if (!c.model_file.empty()) j["pem_model"] = c.model_file;
  j["seed"] = c.seed;
  return j;
}

std::vector<double> parse_strengths(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

int cmd_run(const Cmd& c, std::ostream& out) {
  const Scenario scenario = load_scenario(resolve_scenario_path(c.scenario));
  ErrorSequence e(scenario.duration_T, scenario.agent_count());
  if (!c.errors_file.empty()) {
    std::uint64_t hash = 0;
    e = load_error_sequence(c.errors_file, &hash);
    if (hash != scenario_hash(scenario))
      throw std::runtime_error("error file was recorded for a different scenario");
  }
  const Rollout r = rollout(scenario, e);
  const GroundTruthSequence y = generate_ground_truth(scenario);
  const MetricReport report = metric_report(y, r.perceived);

  const fs::path dir = c.out_dir.empty()
                           ? fs::path(default_out_root()) / ("run-" + scenario.scenario_id)
                           : fs::path(c.out_dir);
  prepare_outdir(dir, c.force);
  write_file(dir / "config.echo", config_echo("run", c).dump(2) + "\n");
  write_file(dir / "rollout.csv", rollout_to_csv(scenario, r));
  write_file(dir / "metrics.json", metric_report_to_json(report));
  out << "scenario=" << scenario.scenario_id << " rule_value=" << num(clip_sentinel(r.rule_value))
      << " nds=" << num(report.nds) << " nds_t=" << num(report.nds_t) << "\n";
  return r.rule_value < 0.0 ? 2 : 0;
}

int cmd_attack(const Cmd& c, std::ostream& out) {
  const Scenario scenario = load_scenario(resolve_scenario_path(c.scenario));
  const Objective objective = objective_from_string(c.metric);
  const PemModel pem = load_model_or_default(c.model_file);

  // Tuned-stack precondition: perfect perception must be safe.
  const ErrorSequence zero(scenario.duration_T, scenario.agent_count());
  if (rollout(scenario, zero).rule_value < 0.0)
    throw std::runtime_error("scenario " + scenario.scenario_id +
                             " fails the rule under perfect perception; nothing to attack");

  const GroundTruthSequence y = generate_ground_truth(scenario);
  const HeuristicResult heuristic = heuristic_search(scenario);
  if (heuristic.status != "ok")
    throw std::runtime_error("heuristic search found no influential agents in " +
                             scenario.scenario_id);

  // Shared heuristic initialisation: best candidate under this objective.
  int best_idx = 0;
  double best_alpha = -1.0;
  for (std::size_t i = 0; i < heuristic.attacks.size(); ++i) {
    const double a =
        objective_value(objective, y, apply_errors(y, heuristic.attacks[i]),
                        heuristic.attacks[i], pem);
    if (a > best_alpha) {
      best_alpha = a;
      best_idx = static_cast<int>(i);
    }
  }

  const AttackResult result =
      random_search(scenario, heuristic.attacks[best_idx], objective, pem, c.seed);

  const Rollout replay = rollout(scenario, result.best_error);
  const MetricReport report = metric_report(y, replay.perceived);
  const double pem_ll = log_likelihood(pem, y, result.best_error);

  // Reference point: the plain full-drop attack for the same agent.
  const int agent = heuristic.influential_agents[best_idx];
  const ErrorSequence full_drop =
      full_drop_error(agent, scenario.duration_T, scenario.agent_count());
  const double full_drop_alpha =
      objective_value(objective, y, apply_errors(y, full_drop), full_drop, pem);

  const std::string run_id =
      "attack-" + scenario.scenario_id + "-" + objective_name(objective) + "-s" +
      std::to_string(c.seed);
  const fs::path dir =
      c.out_dir.empty() ? fs::path(default_out_root()) / run_id : fs::path(c.out_dir);
  prepare_outdir(dir, c.force);
  write_file(dir / "config.echo", config_echo("attack", c).dump(2) + "\n");
  write_file(dir / "trace.csv", trace_to_csv(result));
  save_error_sequence(result.best_error, scenario_hash(scenario), (dir / "attack.err").string());

  json summary;
  summary["scenario"] = scenario.scenario_id;
  summary["metric"] = objective_name(objective);
  summary["seed"] = c.seed;
  summary["best_alpha"] = result.best_alpha;
  summary["full_drop_alpha"] = full_drop_alpha;
  summary["rule_value"] = clip_sentinel(replay.rule_value);
  summary["counts"] = {{"fn", report.fn}, {"tp", report.tp}};
  summary["mpe"] = report.ate;
  summary["maoe"] = report.aoe;
  summary["nds"] = report.nds;
  summary["nds_t"] = report.nds_t;
  summary["pem_ll"] = pem_ll;
  summary["rollouts"] = {{"heuristic", heuristic.rollout_count},
                         {"random", result.rollout_count}};
  summary["influential_agents"] = heuristic.influential_agents;
  summary["attacked_agent"] = agent;
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  out << "attack " << scenario.scenario_id << " metric=" << objective_name(objective)
      << " alpha=" << num(result.best_alpha) << " rule_value=" << num(replay.rule_value)
      << " fn=" << report.fn << "/" << report.fn + report.tp << " -> " << dir.string() << "\n";
  return 0;
}

int cmd_probe(const Cmd& c, std::ostream& out) {
  const Scenario scenario = load_scenario(resolve_scenario_path(c.scenario));
  std::uint64_t hash = 0;
  const ErrorSequence e_star = load_error_sequence(c.errors_file, &hash);
  if (hash != scenario_hash(scenario))
    throw std::runtime_error("error file was recorded for a different scenario");
  if (rollout(scenario, e_star).rule_value >= 0.0)
    throw std::runtime_error("probe: supplied error sequence does not fail the rule");

  const auto strengths = parse_strengths(c.strengths);
  const auto curve = robustness_probe(scenario, e_star, strengths, c.n, c.seed);

  const fs::path dir = c.out_dir.empty()
                           ? fs::path(default_out_root()) / ("probe-" + scenario.scenario_id)
                           : fs::path(c.out_dir);
  prepare_outdir(dir, c.force);
  write_file(dir / "config.echo", config_echo("probe", c).dump(2) + "\n");
  std::ostringstream csv;
  csv << "strength,adversarial_fraction,mean_nds,mean_nds_t\n";
  for (const ProbePoint& p : curve)
    csv << num(p.strength) << ',' << num(p.adversarial_fraction) << ',' << num(p.mean_nds) << ','
        << num(p.mean_nds_t) << '\n';
  write_file(dir / "probe.csv", csv.str());
  out << "probe " << scenario.scenario_id << ": " << curve.size() << " strengths -> "
      << dir.string() << "\n";
  return 0;
}

int cmd_pem_fit(const Cmd& c, std::ostream& out) {
  const PemDataset data = pem_dataset_from_csv(read_file(c.data_file));
  const PemModel model = fit(data);
  const fs::path dir =
      c.out_dir.empty() ? fs::path(default_out_root()) / "pem-fit" : fs::path(c.out_dir);
  prepare_outdir(dir, c.force);
  write_file(dir / "model.json", pem_model_to_json(model));
  out << "fitted PEM on " << data.size() << " rows -> " << (dir / "model.json").string() << "\n";
  return 0;
}

int cmd_pem_synth(const Cmd& c, std::ostream& out) {
  SynthLogConfig config;
  config.preset = c.preset;
  config.rows = c.rows;
  const PemDataset data = synth_logs(config, c.seed);
  const fs::path dir =
      c.out_dir.empty() ? fs::path(default_out_root()) / ("pem-synth-" + c.preset)
                        : fs::path(c.out_dir);
  prepare_outdir(dir, c.force);
  write_file(dir / "logs.csv", pem_dataset_to_csv(data));
  out << "generated " << data.size() << " rows (" << c.preset << ") -> "
      << (dir / "logs.csv").string() << "\n";
  return 0;
}

int cmd_pem_sample(const Cmd& c, std::ostream& out) {
  const PemModel model = load_model_or_default(c.model_file);
  std::vector<std::string> names =
      c.scenario == "all" ? bundled_scenario_names() : std::vector<std::string>{c.scenario};

  const fs::path dir =
      c.out_dir.empty() ? fs::path(default_out_root()) / ("pem-sample-s" + std::to_string(c.seed))
                        : fs::path(c.out_dir);
  prepare_outdir(dir, c.force);
  write_file(dir / "config.echo", config_echo("pem-sample", c).dump(2) + "\n");

  int violations = 0;
  std::ostringstream csv;
  csv << "scenario,sample,rule_value,nds,nds_t\n";
  for (const std::string& name : names) {
    const Scenario scenario = load_scenario(resolve_scenario_path(name));
    const GroundTruthSequence y = generate_ground_truth(scenario);
    for (int i = 0; i < c.count; ++i) {
      const ErrorSequence e = sample_errors(model, y, derive_seed(c.seed, i));
      double rule = kNoAgentSentinel;
      if (c.check_rule) rule = clip_sentinel(rollout(scenario, e).rule_value);
      const MetricReport rep = metric_report(y, apply_errors(y, e));
      csv << scenario.scenario_id << ',' << i << ',' << num(rule) << ',' << num(rep.nds) << ','
          << num(rep.nds_t) << '\n';
      if (c.check_rule && rule < 0.0) ++violations;
    }
  }
  write_file(dir / "samples.csv", csv.str());
  out << "sampled " << c.count << " perception draws per scenario";
  if (c.check_rule) out << "; rule violations: " << violations;
  out << " -> " << dir.string() << "\n";
  return (c.check_rule && violations > 0) ? 2 : 0;
}

int cmd_render(const Cmd& c, std::ostream& out) {
  const fs::path dir =
      c.out_dir.empty() ? fs::path(default_out_root()) / "render" : fs::path(c.out_dir);
  prepare_outdir(dir, c.force);
  if (!c.input_file.empty()) {
    const std::string svg = render_csv_chart(read_file(c.input_file), fs::path(c.input_file).stem().string());
    const fs::path target = dir / (fs::path(c.input_file).stem().string() + ".svg");
    write_file(target, svg);
    out << "rendered " << target.string() << "\n";
    return 0;
  }
  if (c.scenario.empty())
    throw std::runtime_error("render: need --input <csv> or --scenario [--errors]");
  const Scenario scenario = load_scenario(resolve_scenario_path(c.scenario));
  ErrorSequence e(scenario.duration_T, scenario.agent_count());
  if (!c.errors_file.empty()) {
    std::uint64_t hash = 0;
    e = load_error_sequence(c.errors_file, &hash);
    if (hash != scenario_hash(scenario))
      throw std::runtime_error("error file was recorded for a different scenario");
  }
  const Rollout r = rollout(scenario, e);
  fs::create_directories(dir / "frames");
  int written = 0;
  for (int t = 0; t < scenario.duration_T; t += std::max(1, c.every)) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.svg", t);
    write_file(dir / "frames" / name, render_frame_svg(scenario, r, t));
    ++written;
  }
  out << "rendered " << written << " frames -> " << (dir / "frames").string() << "\n";
  return 0;
}

}  // namespace

std::string resolve_scenario_path(const std::string& name_or_path) {
  if (fs::exists(name_or_path)) return name_or_path;
  if (const char* env = std::getenv("ADVPERR_SCENARIO_DIR")) {
    const fs::path override = fs::path(env) / (name_or_path + ".json");
    if (fs::exists(override)) return override.string();
  }
  const fs::path bundled = fs::path(ADVPERR_SCENARIO_DIR) / (name_or_path + ".json");
  if (fs::exists(bundled)) return bundled.string();
  throw std::runtime_error("scenario not found: " + name_or_path);
}

std::vector<std::string> bundled_scenario_names() {
  return {"lane_follow", "overtake_follow", "overtake", "left_turn", "right_turn"};
}

int cli_run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial perception error toolkit"};
  app.require_subcommand(1);
  Cmd c;

  auto* run = app.add_subcommand("run", "Roll out a scenario and score it");
  run->add_option("--scenario", c.scenario, "Scenario name or file")->required();
  run->add_option("--errors", c.errors_file, "Error sequence to replay");
  run->add_option("--out", c.out_dir, "Output directory");
  run->add_flag("--force", c.force, "Overwrite existing outputs");

  auto* attack = app.add_subcommand("attack", "Search for an adversarial perception error");
  attack->add_option("--scenario", c.scenario)->required();
  attack->add_option("--metric", c.metric, "nds | nds-t | pem-ll");
  attack->add_option("--seed", c.seed)->required();
  attack->add_option("--pem", c.model_file, "PEM model JSON (default: tuned built-in)");
  attack->add_option("--out", c.out_dir);
  attack->add_flag("--force", c.force);

  auto* probe = app.add_subcommand("probe", "Robustness probe around a saved attack");
  probe->add_option("--scenario", c.scenario)->required();
  probe->add_option("--errors", c.errors_file)->required();
  probe->add_option("--strengths", c.strengths, "Comma-separated strengths in [0,1]");
  probe->add_option("--n", c.n, "Perturbations per strength");
  probe->add_option("--seed", c.seed)->required();
  probe->add_option("--out", c.out_dir);
  probe->add_flag("--force", c.force);

  auto* pem_fit = app.add_subcommand("pem-fit", "Fit a PEM to detector logs");
  pem_fit->add_option("--data", c.data_file, "Detector log CSV")->required();
  pem_fit->add_option("--out", c.out_dir);
  pem_fit->add_flag("--force", c.force);

  auto* pem_synth = app.add_subcommand("pem-synth", "Generate synthetic detector logs");
  pem_synth->add_option("--preset", c.preset, "clean | moderate | noisy");
  pem_synth->add_option("--rows", c.rows);
  pem_synth->add_option("--seed", c.seed)->required();
  pem_synth->add_option("--out", c.out_dir);
  pem_synth->add_flag("--force", c.force);

  auto* pem_sample = app.add_subcommand("pem-sample", "Sample perception draws from a PEM");
  pem_sample->add_option("--scenario", c.scenario, "Scenario name, file, or 'all'")->required();
  pem_sample->add_option("--model", c.model_file);
  pem_sample->add_option("--count", c.count);
  pem_sample->add_flag("--check-rule", c.check_rule, "Roll out each sample and check the rule");
  pem_sample->add_option("--seed", c.seed)->required();
  pem_sample->add_option("--out", c.out_dir);
  pem_sample->add_flag("--force", c.force);

  auto* render = app.add_subcommand("render", "Render charts or frame snapshots");
  render->add_option("--input", c.input_file, "CSV to chart (trace/probe)");
  render->add_option("--scenario", c.scenario);
  render->add_option("--errors", c.errors_file);
  render->add_option("--every", c.every, "Frame stride for snapshots");
  render->add_option("--out", c.out_dir);
  render->add_flag("--force", c.force);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(c, out);
    if (attack->parsed()) return cmd_attack(c, out);
    if (probe->parsed()) return cmd_probe(c, out);
    if (pem_fit->parsed()) return cmd_pem_fit(c, out);
    if (pem_synth->parsed()) return cmd_pem_synth(c, out);
    if (pem_sample->parsed()) return cmd_pem_sample(c, out);
    if (render->parsed()) return cmd_render(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no command\n";
  return 1;
}

}  // namespace advperr
