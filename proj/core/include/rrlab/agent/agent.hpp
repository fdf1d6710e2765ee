#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "rrlab/agent/config.hpp"
#include "rrlab/numcore/adam.hpp"
#include "rrlab/numcore/rng.hpp"
#include "rrlab/qnet/network.hpp"
#include "rrlab/replay/nstep.hpp"
#include "rrlab/replay/replay_buffer.hpp"

namespace rrlab::agent {

// reward + (done ? 0 : discount_n * q_target_next[argmax(q_online_next)]):
// the online network selects, the target network evaluates.
double double_q_target(double reward, double discount_n, bool done,
                       std::span<const double> q_online_next,
                       std::span<const double> q_target_next);

// Training-time policy: with probability eps(t) a uniform action, otherwise
// greedy over the network's action values (categorical heads compare
// expected values). Noisy networks use eps_noisy and fresh noise instead of
// the epsilon schedule.
int64_t select_action(std::span<const double> obs, int64_t t, const AgentConfig& cfg,
                      qnet::QNetwork& network, numcore::Rng& action_rng,
                      numcore::Rng& noise_rng);

struct TrainStats {
  double loss = 0.0;
  double mean_abs_error = 0.0;  // |TD error| or cross-entropy, the priority signal
};

/// DQN/Rainbow-style value agent: online + target network, replay buffer,
/// n-step assembly and Adam. The interaction counter t advances in
/// observe(); the update counter u advances in train_step(). The caller
/// (normally TrainingRun) owns the cadence: every tau_u interactions past
/// warmup it calls train_step() k times. One agent is strictly
/// single-threaded; all randomness flows from the seed through split
/// streams, so a run is reproducible bit for bit.
class Agent {
public:
  Agent(AgentConfig cfg, int64_t obs_dim, int64_t action_count,
        std::pair<double, double> return_range);

  const AgentConfig& config() const { return cfg_; }
  int64_t interactions() const { return t_; }
  int64_t updates() const { return u_; }
  int64_t action_count() const { return actions_; }

  // Training policy at the current interaction count.
  int64_t act(std::span<const double> obs);
  // Evaluation policy: greedy with the given epsilon, noise zeroed, all
  // randomness from the dedicated eval stream.
  int64_t act_greedy(std::span<const double> obs, double epsilon);
  double epsilon_now() const { return epsilon_at(t_, cfg_); }
  uint64_t draw_eval_seed() { return rng_eval_.next_u64(); }

  // Record one environment step; advances t and feeds the n-step pipeline.
  void observe(std::vector<double> obs, int64_t action, double reward,
               std::vector<double> next_obs, bool done);

  // One gradient update on a sampled batch; syncs the target network every
  // tau_t updates. Throws NotReadyError while the buffer is under-filled.
  TrainStats train_step();
  void sync_target();

  // Linear priority-beta annealing handle, fraction in [0, 1].
  void set_progress(double fraction);

  const qnet::QNetwork& online() const { return online_; }
  const qnet::QNetwork& target() const { return target_; }
  qnet::QNetwork& online_mutable() { return online_; }
  replay::ReplayBuffer& buffer() { return buffer_; }
  const replay::ReplayBuffer& buffer() const { return buffer_; }
  const replay::NStepAssembler& nstep() const { return nstep_; }

  void save(std::ostream& os) const;
  void load(std::istream& is);

private:
  struct BatchTargets {
    std::vector<double> scalar_targets;          // scalar heads
    std::vector<double> categorical_targets;     // [B x n_atoms] row-major
  };
  BatchTargets compute_targets(const replay::SampledBatch& batch);

  AgentConfig cfg_;
  int64_t obs_dim_ = 0;
  int64_t actions_ = 0;
  qnet::QNetwork online_;
  qnet::QNetwork target_;
  replay::ReplayBuffer buffer_;
  replay::NStepAssembler nstep_;
  numcore::AdamState adam_;
  int64_t t_ = 0;
  int64_t u_ = 0;
  numcore::Rng rng_action_{0};
  numcore::Rng rng_noise_{0};
  numcore::Rng rng_replay_{0};
  numcore::Rng rng_eval_{0};
};

}  // namespace rrlab::agent
