#include "rrlab/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rrlab/errors.hpp"
#include "rrlab/harness/sha1.hpp"
#include "rrlab/metrics/csv.hpp"
#include "rrlab/metrics/evaluation.hpp"

namespace rrlab::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json agent_config_json(const agent::AgentConfig& c) {
  json j;
  j["gamma"] = c.gamma;
  j["n_step"] = c.n_step;
  j["batch_size"] = c.batch_size;
  j["tau_u"] = c.tau_u;
  j["k"] = c.k;
  j["tau_t"] = c.tau_t;
  j["warmup"] = c.warmup;
  j["eps_start"] = c.eps_start;
  j["eps_final"] = c.eps_final;
  j["eps_noisy"] = c.eps_noisy;
  j["eps_eval"] = c.eps_eval;
  j["eps_decay_period"] = c.eps_decay_period;
  j["replay_capacity"] = c.replay_capacity;
  j["replay_mode"] =
      c.replay_mode == replay::ReplayMode::kPrioritized ? "prioritized" : "uniform";
  j["priority_alpha"] = c.priority_alpha;
  j["priority_beta_start"] = c.priority_beta_start;
  j["priority_beta_end"] = c.priority_beta_end;
  j["priority_epsilon"] = c.priority_epsilon;
  j["double_q"] = c.double_q;
  j["dueling"] = c.dueling;
  j["noisy"] = c.noisy;
  j["categorical"] = c.categorical;
  j["n_atoms"] = c.n_atoms;
  if (std::isnan(c.v_min)) j["v_min"] = nullptr; else j["v_min"] = c.v_min;
  if (std::isnan(c.v_max)) j["v_max"] = nullptr; else j["v_max"] = c.v_max;
  j["noisy_sigma0"] = c.noisy_sigma0;
  j["learning_rate"] = c.learning_rate;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_eps"] = c.adam_eps;
  j["huber_kappa"] = c.huber_kappa;
  j["reward_clip"] = c.reward_clip;
  j["hidden"] = c.hidden;
  j["eval_episodes"] = c.eval_episodes;
  j["seed"] = c.seed;
  return j;
}

void apply_agent_overrides(agent::AgentConfig& c, const json& j,
                           std::vector<std::string>& problems) {
  static const char* known[] = {
      "gamma", "n_step", "batch_size", "tau_u", "k", "tau_t", "warmup", "eps_start",
      "eps_final", "eps_noisy", "eps_eval", "eps_decay_period", "replay_capacity",
      "replay_mode", "priority_alpha", "priority_beta_start", "priority_beta_end",
      "priority_epsilon", "double_q", "dueling", "noisy", "categorical", "n_atoms",
      "v_min", "v_max", "noisy_sigma0", "learning_rate", "adam_beta1", "adam_beta2",
      "adam_eps", "huber_kappa", "reward_clip", "hidden", "eval_episodes", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) problems.push_back("unknown agent config field \"" + it.key() + "\"");
  }
  try {
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
    if (j.contains("n_step")) c.n_step = j["n_step"].get<int32_t>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int64_t>();
    if (j.contains("tau_u")) c.tau_u = j["tau_u"].get<int64_t>();
    if (j.contains("k")) c.k = j["k"].get<int64_t>();
    if (j.contains("tau_t")) c.tau_t = j["tau_t"].get<int64_t>();
    if (j.contains("warmup")) c.warmup = j["warmup"].get<int64_t>();
    if (j.contains("eps_start")) c.eps_start = j["eps_start"].get<double>();
    if (j.contains("eps_final")) c.eps_final = j["eps_final"].get<double>();
    if (j.contains("eps_noisy")) c.eps_noisy = j["eps_noisy"].get<double>();
    if (j.contains("eps_eval")) c.eps_eval = j["eps_eval"].get<double>();
    if (j.contains("eps_decay_period"))
      c.eps_decay_period = j["eps_decay_period"].get<int64_t>();
    if (j.contains("replay_capacity")) c.replay_capacity = j["replay_capacity"].get<int64_t>();
    if (j.contains("replay_mode")) {
      std::string m = j["replay_mode"].get<std::string>();
      if (m == "uniform") c.replay_mode = replay::ReplayMode::kUniform;
      else if (m == "prioritized") c.replay_mode = replay::ReplayMode::kPrioritized;
      else problems.push_back("replay_mode must be \"uniform\" or \"prioritized\"");
    }
    if (j.contains("priority_alpha")) c.priority_alpha = j["priority_alpha"].get<double>();
    if (j.contains("priority_beta_start"))
      c.priority_beta_start = j["priority_beta_start"].get<double>();
    if (j.contains("priority_beta_end"))
      c.priority_beta_end = j["priority_beta_end"].get<double>();
    if (j.contains("priority_epsilon"))
      c.priority_epsilon = j["priority_epsilon"].get<double>();
    if (j.contains("double_q")) c.double_q = j["double_q"].get<bool>();
    if (j.contains("dueling")) c.dueling = j["dueling"].get<bool>();
    if (j.contains("noisy")) c.noisy = j["noisy"].get<bool>();
    if (j.contains("categorical")) c.categorical = j["categorical"].get<bool>();
    if (j.contains("n_atoms")) c.n_atoms = j["n_atoms"].get<int64_t>();
    if (j.contains("v_min")) c.v_min = j["v_min"].is_null() ? NAN : j["v_min"].get<double>();
    if (j.contains("v_max")) c.v_max = j["v_max"].is_null() ? NAN : j["v_max"].get<double>();
    if (j.contains("noisy_sigma0")) c.noisy_sigma0 = j["noisy_sigma0"].get<double>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("adam_beta1")) c.adam_beta1 = j["adam_beta1"].get<double>();
    if (j.contains("adam_beta2")) c.adam_beta2 = j["adam_beta2"].get<double>();
    if (j.contains("adam_eps")) c.adam_eps = j["adam_eps"].get<double>();
    if (j.contains("huber_kappa")) c.huber_kappa = j["huber_kappa"].get<double>();
    if (j.contains("reward_clip")) c.reward_clip = j["reward_clip"].get<bool>();
    if (j.contains("hidden")) c.hidden = j["hidden"].get<std::vector<int64_t>>();
    if (j.contains("eval_episodes")) c.eval_episodes = j["eval_episodes"].get<int64_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
  } catch (const json::exception& e) {
    problems.push_back(std::string("agent config field has the wrong type: ") + e.what());
  }
}

}  // namespace

std::string agent_config_to_json(const agent::AgentConfig& cfg) {
  return agent_config_json(cfg).dump(2);
}

ExperimentSpec ExperimentSpec::parse(const std::string& json_text, const CliOverrides& overrides,
                                     const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError({std::string("experiment spec is not valid JSON: ") + e.what()});
  }
  if (!j.is_object()) throw ValidationError({"experiment spec must be a JSON object"});

  std::vector<std::string> problems;
  ExperimentSpec spec;

  // Environment: inline object or a file reference.
  try {
    if (j.contains("environment")) {
      spec.env = envs::EnvSpec::parse(j["environment"].dump());
    } else if (j.contains("environment_file")) {
      fs::path p = j["environment_file"].get<std::string>();
      if (p.is_relative()) p = fs::path(base_dir) / p;
      spec.env = envs::EnvSpec::load_file(p.string());
    } else {
      problems.push_back("spec needs \"environment\" (inline) or \"environment_file\"");
    }
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations()) problems.push_back(v);
  } catch (const Error& e) {
    problems.push_back(e.what());
  }

  // Precedence: defaults < preset < file agent block < CLI flags.
  std::string preset_name = j.value("preset", std::string());
  if (overrides.preset) preset_name = *overrides.preset;
  spec.preset = preset_name;
  spec.preset_scale = j.value("preset_scale", int64_t{1});
  agent::AgentConfig cfg;
  if (!preset_name.empty()) {
    try {
      cfg = agent::AgentConfig::preset(preset_name);
      if (spec.preset_scale > 1) cfg = cfg.scaled(spec.preset_scale);
    } catch (const KeyError& e) {
      problems.push_back(e.what());
    }
  }
  if (j.contains("agent")) {
    if (!j["agent"].is_object()) problems.push_back("\"agent\" must be an object");
    else apply_agent_overrides(cfg, j["agent"], problems);
  }
  spec.agent = cfg;

  try {
    if (j.contains("seeds")) spec.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (j.contains("max_interactions")) spec.max_interactions = j["max_interactions"].get<int64_t>();
    if (j.contains("eval_cadence")) spec.eval_cadence = j["eval_cadence"].get<int64_t>();
    if (j.contains("thresholds")) spec.thresholds = j["thresholds"].get<std::vector<double>>();
    if (j.contains("out_dir")) spec.out_dir = j["out_dir"].get<std::string>();
  } catch (const json::exception& e) {
    problems.push_back(std::string("experiment field has the wrong type: ") + e.what());
  }

  if (overrides.seed) spec.seeds = {*overrides.seed};
  if (overrides.max_steps) spec.max_interactions = *overrides.max_steps;
  if (overrides.out_dir) spec.out_dir = *overrides.out_dir;

  if (spec.thresholds.empty() && !problems.empty()) {
    // env failed to parse; nothing to default from
  } else if (spec.thresholds.empty()) {
    spec.thresholds = {spec.env.solve_threshold()};
  }

  if (!problems.empty()) throw ValidationError(std::move(problems));
  return spec;
}

ExperimentSpec ExperimentSpec::load_file(const std::string& path, const CliOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw KeyError(path, "cannot open experiment spec file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), overrides, fs::path(path).parent_path().string());
}

void ExperimentSpec::validate_or_throw() const {
  std::vector<std::string> problems = agent.validate();
  if (seeds.empty()) problems.push_back("seeds must be non-empty");
  for (size_t i = 0; i < seeds.size(); ++i)
    for (size_t k = i + 1; k < seeds.size(); ++k)
      if (seeds[i] == seeds[k])
        problems.push_back("duplicate seed " + std::to_string(seeds[i]));
  if (max_interactions <= agent.warmup)
    problems.push_back("max_interactions must exceed the agent warmup");
  if (eval_cadence < 1) problems.push_back("eval_cadence must be >= 1");
  if (out_dir.empty()) problems.push_back("out_dir must be set");
  if (thresholds.empty()) problems.push_back("at least one reach threshold is required");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::string ExperimentSpec::canonical_json() const {
  json j;
  j["schema_version"] = 1;
  j["environment"] = json::parse(env.canonical_json());
  if (preset.empty()) j["preset"] = nullptr; else j["preset"] = preset;
  j["preset_scale"] = preset_scale;
  j["agent"] = agent_config_json(agent);
  j["seeds"] = seeds;
  j["max_interactions"] = max_interactions;
  j["eval_cadence"] = eval_cadence;
  j["thresholds"] = thresholds;
  j["out_dir"] = out_dir;
  return j.dump(2);
}

namespace {

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
  }
  fs::rename(tmp, path);
}

std::string curve_csv_text(const std::vector<agent::EvalPoint>& points) {
  std::ostringstream os;
  metrics::CsvWriter w(os, "interactions,eval_return,epsilon,updates,loss_mean");
  for (const agent::EvalPoint& p : points) {
    w.row({std::to_string(p.interactions), metrics::format_double(p.mean_return),
           metrics::format_double(p.epsilon), std::to_string(p.updates),
           metrics::format_double(p.loss_mean)});
  }
  return os.str();
}

}  // namespace

std::vector<RunArtifact> run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
  spec.validate_or_throw();
  fs::create_directories(spec.out_dir);
  write_file_atomic(fs::path(spec.out_dir) / "experiment.json", spec.canonical_json() + "\n");

  std::vector<RunArtifact> artifacts;
  for (uint64_t seed : spec.seeds) {
    auto started = std::chrono::steady_clock::now();
    RunArtifact art;
    art.seed = seed;

    agent::AgentConfig cfg = spec.agent;
    cfg.seed = seed;

    ExperimentSpec seed_spec = spec;
    seed_spec.agent = cfg;
    seed_spec.seeds = {seed};

    fs::path seed_dir = fs::path(spec.out_dir) / ("seed_" + std::to_string(seed));
    fs::create_directories(seed_dir);
    fs::path ckpt_path = seed_dir / "checkpoint.bin";
    art.curve_csv_path = (seed_dir / "curve.csv").string();
    art.summary_json_path = (seed_dir / "summary.json").string();
    art.content_hash = git_blob_hash(seed_spec.canonical_json());

    try {
      std::unique_ptr<agent::TrainingRun> run;
      if (opts.resume && fs::exists(ckpt_path)) {
        std::ifstream in(ckpt_path, std::ios::binary);
        if (!in) throw IoError("cannot open checkpoint " + ckpt_path.string());
        run = std::make_unique<agent::TrainingRun>(
            agent::TrainingRun::load(in, spec.env.instantiate()));
      } else {
        run = std::make_unique<agent::TrainingRun>(cfg, spec.env.instantiate(),
                                                   spec.max_interactions, spec.eval_cadence);
      }

      bool interrupted = false;
      while (!run->finished()) {
        run->run(run->agent().interactions() + 1);  // advance to the next eval point
        if (opts.write_checkpoints) {
          std::ostringstream buf;
          run->save(buf);
          write_file_atomic(ckpt_path, buf.str());
        }
        if (opts.stop_after && run->agent().interactions() >= *opts.stop_after &&
            !run->finished()) {
          interrupted = true;
          break;
        }
      }

      art.resolved_agent = run->agent().config();
      art.curve = run->curve();
      art.updates = run->agent().updates();
      int64_t past_warmup = std::max<int64_t>(1, run->agent().interactions() - cfg.warmup);
      art.realized_ratio = static_cast<double>(art.updates) / static_cast<double>(past_warmup);
      if (!run->eval_points().empty()) art.final_return = run->eval_points().back().mean_return;

      write_file_atomic(art.curve_csv_path, curve_csv_text(run->eval_points()));

      json summary;
      summary["schema_version"] = 1;
      if (spec.preset.empty()) summary["preset"] = nullptr; else summary["preset"] = spec.preset;
      if (spec.preset == "HRainbow-proxy") summary["proxy"] = true;
      summary["seed"] = seed;
      summary["environment"] = json::parse(spec.env.canonical_json());
      summary["resolved_config"] = agent_config_json(art.resolved_agent);
      summary["max_interactions"] = spec.max_interactions;
      summary["eval_cadence"] = spec.eval_cadence;
      summary["interrupted"] = interrupted;
      summary["final_return"] = art.final_return;
      summary["updates"] = art.updates;
      summary["configured_ratio"] = cfg.ratio();
      summary["realized_ratio"] = art.realized_ratio;
      json reach = json::object();
      for (double threshold : spec.thresholds) {
        metrics::ReachResult r = metrics::interactions_to_reach(
            art.curve, threshold, 0.0, static_cast<double>(spec.max_interactions));
        reach[metrics::format_double(threshold)] = {{"interactions", r.interactions},
                                                    {"clipped", r.clipped}};
      }
      summary["interactions_to_reach"] = reach;
      art.wall_clock_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      summary["wall_clock_seconds"] = art.wall_clock_seconds;
      summary["content_hash"] = art.content_hash;
      write_file_atomic(art.summary_json_path, summary.dump(2) + "\n");
    } catch (const std::exception& e) {
      art.failed = true;
      art.failure = e.what();
      json failure;
      failure["schema_version"] = 1;
      failure["seed"] = seed;
      failure["error"] = e.what();
      write_file_atomic(seed_dir / "failure.json", failure.dump(2) + "\n");
    }
    artifacts.push_back(std::move(art));
  }
  return artifacts;
}

}  // namespace rrlab::harness
