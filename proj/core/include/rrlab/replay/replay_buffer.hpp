#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rrlab/numcore/rng.hpp"
#include "rrlab/replay/sum_tree.hpp"
#include "rrlab/replay/transition.hpp"

namespace rrlab::replay {

enum class ReplayMode { kUniform, kPrioritized };

struct SampledBatch {
  std::vector<int64_t> indices;
  std::vector<double> weights;                   // max-normalized within the batch
  std::vector<const Transition*> transitions;    // valid until the next append
};

/// Ring buffer of transitions with either uniform sampling (without
/// replacement, unit weights) or proportional prioritized sampling via the
/// sum tree (stratified over equal segments, importance weights
/// (size * P(i))^-beta normalized by the batch maximum).
/// Single-writer, single-reader; the training loop owns the buffer.
class ReplayBuffer {
public:
  ReplayBuffer() = default;
  ReplayBuffer(int64_t capacity, ReplayMode mode, double alpha = 0.5,
               double priority_epsilon = 1e-6);

  int64_t capacity() const { return capacity_; }
  int64_t size() const { return static_cast<int64_t>(storage_.size()); }
  ReplayMode mode() const { return mode_; }
  double alpha() const { return alpha_; }
  double priority_epsilon() const { return priority_epsilon_; }
  double beta() const { return beta_; }
  void set_beta(double beta) { beta_ = beta; }

  // Without an explicit priority a fresh transition gets the current maximum
  // leaf priority (1.0 on an empty buffer). The slot's priority is written in
  // the same call as the transition, so a ring overwrite can never leave a
  // stale priority behind.
  void append(Transition t, std::optional<double> initial_priority = std::nullopt);

  // Throws NotReadyError while size() < batch_size.
  SampledBatch sample(int64_t batch_size, numcore::Rng& rng) const;

  // p_i = (|td_error| + priority_epsilon)^alpha.
  void update_priorities(std::span<const int64_t> indices, std::span<const double> td_errors);

  const Transition& at(int64_t index) const { return storage_[static_cast<size_t>(index)]; }
  double priority(int64_t index) const;
  const SumTree& tree() const { return tree_; }

  // Versioned little-endian snapshot (see README for the field order).
  void save(std::ostream& os) const;
  static ReplayBuffer load(std::istream& is);

private:
  int64_t capacity_ = 0;
  ReplayMode mode_ = ReplayMode::kUniform;
  double alpha_ = 0.5;
  double priority_epsilon_ = 1e-6;
  double beta_ = 0.4;
  std::vector<Transition> storage_;
  int64_t cursor_ = 0;
  SumTree tree_;  // prioritized mode only
};

}  // namespace rrlab::replay
