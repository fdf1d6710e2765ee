#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrlab/agent/config.hpp"
#include "rrlab/agent/training.hpp"
#include "rrlab/envs/env_factory.hpp"
#include "rrlab/metrics/curve.hpp"

namespace rrlab::harness {

/// Command-line overrides; they beat file values, which beat preset values,
/// which beat built-in defaults.
struct CliOverrides {
  std::optional<std::string> preset;
  std::optional<uint64_t> seed;
  std::optional<int64_t> max_steps;
  std::optional<std::string> out_dir;
};

/// Fully resolved experiment: environment, agent config with every default
/// materialized, seeds, run length, evaluation cadence, reach thresholds and
/// output directory. parse(canonical_json()) round-trips exactly.
struct ExperimentSpec {
  envs::EnvSpec env;
  std::string preset;  // empty when none
  int64_t preset_scale = 1;
  agent::AgentConfig agent;
  std::vector<uint64_t> seeds{1};
  int64_t max_interactions = 0;
  int64_t eval_cadence = 500;
  std::vector<double> thresholds;  // defaults to the env's solve threshold
  std::string out_dir = "runs/out";

  static ExperimentSpec parse(const std::string& json_text, const CliOverrides& overrides = {},
                              const std::string& base_dir = ".");
  static ExperimentSpec load_file(const std::string& path, const CliOverrides& overrides = {});

  // Collects every violation.
  void validate_or_throw() const;
  std::string canonical_json() const;
};

struct RunArtifact {
  uint64_t seed = 0;
  std::string curve_csv_path;
  std::string summary_json_path;
  double wall_clock_seconds = 0.0;
  std::string content_hash;  // git-style blob hash of the resolved inputs
  metrics::LearningCurve curve;
  agent::AgentConfig resolved_agent;
  double final_return = 0.0;
  double realized_ratio = 0.0;
  int64_t updates = 0;
  bool failed = false;
  std::string failure;
};

struct RunOptions {
  bool resume = false;                    // pick up from out_dir checkpoints
  std::optional<int64_t> stop_after;      // simulate an interruption (tests)
  bool write_checkpoints = true;
};

// One training run per seed, sequentially; each seed writes
// out_dir/seed_<N>/{curve.csv, summary.json, checkpoint.bin}. Environment
// faults mid-run produce partial artifacts plus a failure record instead of
// aborting the remaining seeds.
std::vector<RunArtifact> run_experiment(const ExperimentSpec& spec, const RunOptions& opts = {});

// JSON forms of the agent config (used by summaries and the spec parser).
std::string agent_config_to_json(const agent::AgentConfig& cfg);

}  // namespace rrlab::harness
