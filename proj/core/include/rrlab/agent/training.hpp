#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "rrlab/agent/agent.hpp"
#include "rrlab/envs/environment.hpp"
#include "rrlab/metrics/curve.hpp"

namespace rrlab::agent {

struct EvalPoint {
  int64_t interactions = 0;
  double mean_return = 0.0;
  double epsilon = 0.0;
  int64_t updates = 0;
  double loss_mean = 0.0;  // mean training loss since the previous point

  bool operator==(const EvalPoint&) const = default;
};

/// One seeded training run: act, store, and after every tau_u-th interaction
/// past warmup run k gradient updates; evaluate every eval_cadence
/// interactions (greedy policy, zeroed noise, eps_eval) plus once at the
/// end. The whole run state round-trips through save()/load(), and resuming
/// from any checkpoint reproduces the uninterrupted run bit for bit.
class TrainingRun {
public:
  TrainingRun(AgentConfig cfg, std::unique_ptr<envs::Environment> env, int64_t max_interactions,
              int64_t eval_cadence);

  // Advances until done, or returns early right after the first evaluation
  // point at or beyond stop_after (simulating an interruption).
  void run(std::optional<int64_t> stop_after = std::nullopt);
  bool finished() const { return agent_->interactions() >= max_interactions_; }

  const Agent& agent() const { return *agent_; }
  const std::vector<EvalPoint>& eval_points() const { return eval_points_; }
  metrics::LearningCurve curve() const;
  int64_t max_interactions() const { return max_interactions_; }
  int64_t eval_cadence() const { return eval_cadence_; }

  void save(std::ostream& os) const;
  // The environment must be a fresh instance of the same spec; its state is
  // replaced by the checkpointed one.
  static TrainingRun load(std::istream& is, std::unique_ptr<envs::Environment> env);

private:
  TrainingRun() = default;
  void evaluate();

  AgentConfig cfg_;
  std::unique_ptr<envs::Environment> env_;
  std::unique_ptr<Agent> agent_;
  int64_t max_interactions_ = 0;
  int64_t eval_cadence_ = 0;
  std::vector<double> pending_obs_;
  std::vector<EvalPoint> eval_points_;
  double loss_sum_ = 0.0;
  int64_t loss_count_ = 0;
  int64_t expected_updates_ = 0;
};

struct TrainingResult {
  metrics::LearningCurve curve;
  std::vector<EvalPoint> eval_points;
  int64_t interactions = 0;
  int64_t updates = 0;
};

// Convenience wrapper: construct, run to completion, return the curve.
TrainingResult run_training(AgentConfig cfg, std::unique_ptr<envs::Environment> env,
                            int64_t max_interactions, int64_t eval_cadence);

}  // namespace rrlab::agent
