#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rrlab/replay/replay_buffer.hpp"

namespace rrlab::agent {

/// Every knob of the DQN/Rainbow-style agents. The central quantity is the
/// update ratio r = k / tau_u: every tau_u interactions the agent performs k
/// gradient updates (once past warmup). tau_t counts gradient updates
/// between target-network syncs, not interactions, so target staleness in
/// update-space stays constant when k changes.
struct AgentConfig {
  // Schedule.
  double gamma = 0.99;
  int32_t n_step = 1;
  int64_t batch_size = 32;
  int64_t tau_u = 4;              // interactions per update trigger
  int64_t k = 1;                  // gradient updates per trigger
  int64_t tau_t = 200;            // updates between target syncs
  int64_t warmup = 500;           // minimum replay history, in interactions
  double eps_start = 1.0;
  double eps_final = 0.01;
  double eps_noisy = 0.0;         // epsilon used instead when noisy is on
  double eps_eval = 0.001;
  int64_t eps_decay_period = 2000;

  // Replay.
  int64_t replay_capacity = 100000;
  replay::ReplayMode replay_mode = replay::ReplayMode::kUniform;
  double priority_alpha = 0.5;
  double priority_beta_start = 0.4;
  double priority_beta_end = 1.0;
  double priority_epsilon = 1e-6;

  // Component flags.
  bool double_q = false;
  bool dueling = false;
  bool noisy = false;
  bool categorical = false;

  // Distributional head. NaN bounds mean "take the environment's return
  // range" at agent construction.
  int64_t n_atoms = 51;
  double v_min = NAN;
  double v_max = NAN;
  double noisy_sigma0 = 0.5;

  // Optimizer and loss.
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double huber_kappa = 1.0;
  bool reward_clip = false;

  // Network and evaluation.
  std::vector<int64_t> hidden = {64, 64};
  int64_t eval_episodes = 30;

  uint64_t seed = 0;

  // The ratio under study.
  double ratio() const { return static_cast<double>(k) / static_cast<double>(tau_u); }

  // Collects every violation instead of stopping at the first.
  std::vector<std::string> validate() const;
  void validate_or_throw() const;

  // Shipped presets (verbatim large-scale schedules, see README):
  //   OTDQN, OTRainbow, SDQN-cadence, HRainbow-proxy.
  static AgentConfig preset(const std::string& name);
  static std::vector<std::string> preset_names();

  // Desk scaling: divides warmup, eps_decay_period and tau_t by the factor
  // (floored at sane minimums) while leaving tau_u and k untouched.
  AgentConfig scaled(int64_t divisor) const;

  void save(std::ostream& os) const;
  static AgentConfig load(std::istream& is);

  bool operator==(const AgentConfig&) const;
};

// Exploration rate at interaction t: 1.0 before warmup, then linear from
// eps_start to eps_final over eps_decay_period, clamped afterwards.
double epsilon_at(int64_t t, const AgentConfig& cfg);

}  // namespace rrlab::agent
