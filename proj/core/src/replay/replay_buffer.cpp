#include "rrlab/replay/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "rrlab/errors.hpp"
#include "rrlab/io/binio.hpp"
#include "rrlab/replay/nstep.hpp"

namespace rrlab::replay {

namespace {
constexpr uint32_t kBufferMagic = 0x52525242;  // "RRRB"

void put_transition(std::ostream& os, const Transition& t) {
  io::put_f64_vec(os, t.state);
  io::put_i64(os, t.action);
  io::put_f64(os, t.reward);
  io::put_f64_vec(os, t.next_state);
  io::put_u8(os, t.done ? 1 : 0);
  io::put_i64(os, t.n);
  io::put_f64(os, t.discount_n);
}

Transition get_transition(std::istream& is) {
  Transition t;
  t.state = io::get_f64_vec(is);
  t.action = static_cast<int32_t>(io::get_i64(is));
  t.reward = io::get_f64(is);
  t.next_state = io::get_f64_vec(is);
  t.done = io::get_u8(is) != 0;
  t.n = static_cast<int32_t>(io::get_i64(is));
  t.discount_n = io::get_f64(is);
  return t;
}
}  // namespace

ReplayBuffer::ReplayBuffer(int64_t capacity, ReplayMode mode, double alpha,
                           double priority_epsilon)
    : capacity_(capacity), mode_(mode), alpha_(alpha), priority_epsilon_(priority_epsilon) {
  if (capacity <= 0) throw ParameterError("replay capacity must be positive");
  if (alpha < 0.0) throw ParameterError("priority exponent alpha must be >= 0");
  if (priority_epsilon <= 0.0) throw ParameterError("priority floor must be positive");
  if (mode_ == ReplayMode::kPrioritized) tree_ = SumTree(capacity);
}

void ReplayBuffer::append(Transition t, std::optional<double> initial_priority) {
  if (capacity_ == 0) throw ContractViolation("replay buffer not initialized");
  double p = 1.0;
  if (mode_ == ReplayMode::kPrioritized) {
    if (initial_priority) {
      if (!(*initial_priority > 0.0))
        throw ParameterError("explicit replay priority must be positive");
      p = *initial_priority;
    } else if (size() > 0) {
      p = tree_.max_leaf();
      if (!(p > 0.0)) p = 1.0;
    }
  }
  int64_t slot = cursor_;
  if (size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[static_cast<size_t>(slot)] = std::move(t);
  }
  if (mode_ == ReplayMode::kPrioritized) tree_.set(slot, p);
  cursor_ = (cursor_ + 1) % capacity_;
}

double ReplayBuffer::priority(int64_t index) const {
  if (index < 0 || index >= size()) throw ContractViolation("replay index out of range");
  if (mode_ != ReplayMode::kPrioritized) return 1.0;
  return tree_.leaf(index);
}

SampledBatch ReplayBuffer::sample(int64_t batch_size, numcore::Rng& rng) const {
  if (batch_size <= 0) throw ParameterError("batch size must be positive");
  if (size() < batch_size)
    throw NotReadyError("replay holds " + std::to_string(size()) + " transitions, need " +
                        std::to_string(batch_size));
  SampledBatch batch;
  batch.indices.reserve(static_cast<size_t>(batch_size));
  batch.weights.reserve(static_cast<size_t>(batch_size));
  batch.transitions.reserve(static_cast<size_t>(batch_size));

  if (mode_ == ReplayMode::kUniform) {
    // Floyd's sampling: batch_size distinct slots, O(batch) draws.
    std::vector<int64_t> picked;
    picked.reserve(static_cast<size_t>(batch_size));
    for (int64_t j = size() - batch_size; j < size(); ++j) {
      auto candidate = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(j + 1)));
      if (std::find(picked.begin(), picked.end(), candidate) != picked.end()) candidate = j;
      picked.push_back(candidate);
    }
    for (int64_t idx : picked) {
      batch.indices.push_back(idx);
      batch.weights.push_back(1.0);
      batch.transitions.push_back(&storage_[static_cast<size_t>(idx)]);
    }
    return batch;
  }

  double total = tree_.total();
  if (!(total > 0.0)) throw NotReadyError("prioritized replay has zero total priority");
  double segment = total / static_cast<double>(batch_size);
  double max_w = 0.0;
  for (int64_t i = 0; i < batch_size; ++i) {
    double u = (static_cast<double>(i) + rng.next_double()) * segment;
    u = std::min(u, std::nextafter(total, 0.0));
    int64_t idx = tree_.sample(u);
    // Stratification can land on a zero-priority pad leaf at a segment edge;
    // step back to the nearest live slot.
    idx = std::min(idx, size() - 1);
    double prob = tree_.leaf(idx) / total;
    double w = std::pow(static_cast<double>(size()) * prob, -beta_);
    max_w = std::max(max_w, w);
    batch.indices.push_back(idx);
    batch.weights.push_back(w);
    batch.transitions.push_back(&storage_[static_cast<size_t>(idx)]);
  }
  for (double& w : batch.weights) w /= max_w;
  return batch;
}

void ReplayBuffer::update_priorities(std::span<const int64_t> indices,
                                     std::span<const double> td_errors) {
  if (mode_ != ReplayMode::kPrioritized) return;
  if (indices.size() != td_errors.size())
    throw DimensionError("update_priorities: index/error count mismatch");
  for (size_t k = 0; k < indices.size(); ++k) {
    int64_t idx = indices[k];
    if (idx < 0 || idx >= size()) throw ContractViolation("update_priorities: index out of range");
    double p = std::pow(std::abs(td_errors[k]) + priority_epsilon_, alpha_);
    tree_.set(idx, p);
  }
}

void ReplayBuffer::save(std::ostream& os) const {
  io::put_u32(os, kBufferMagic);
  io::put_u32(os, 1);
  io::put_i64(os, capacity_);
  io::put_u8(os, mode_ == ReplayMode::kPrioritized ? 1 : 0);
  io::put_f64(os, alpha_);
  io::put_f64(os, priority_epsilon_);
  io::put_f64(os, beta_);
  io::put_i64(os, cursor_);
  io::put_i64(os, size());
  for (const Transition& t : storage_) put_transition(os, t);
  if (mode_ == ReplayMode::kPrioritized)
    for (int64_t i = 0; i < size(); ++i) io::put_f64(os, tree_.leaf(i));
}

ReplayBuffer ReplayBuffer::load(std::istream& is) {
  io::expect_magic(is, kBufferMagic, "replay buffer");
  if (io::get_u32(is) != 1) throw IoError("unsupported replay snapshot version");
  int64_t capacity = io::get_i64(is);
  ReplayMode mode = io::get_u8(is) ? ReplayMode::kPrioritized : ReplayMode::kUniform;
  double alpha = io::get_f64(is);
  double eps = io::get_f64(is);
  double beta = io::get_f64(is);
  int64_t cursor = io::get_i64(is);
  int64_t count = io::get_i64(is);
  ReplayBuffer buf(capacity, mode, alpha, eps);
  buf.beta_ = beta;
  buf.storage_.reserve(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) buf.storage_.push_back(get_transition(is));
  if (mode == ReplayMode::kPrioritized)
    for (int64_t i = 0; i < count; ++i) buf.tree_.set(i, io::get_f64(is));
  buf.cursor_ = cursor;
  return buf;
}

void NStepAssembler::save(std::ostream& os) const {
  io::put_i64(os, n_);
  io::put_f64(os, gamma_);
  io::put_u64(os, window_.size());
  for (const RawStep& s : window_) {
    io::put_f64_vec(os, s.state);
    io::put_i64(os, s.action);
    io::put_f64(os, s.reward);
    io::put_f64_vec(os, s.next_state);
    io::put_u8(os, s.done ? 1 : 0);
  }
}

void NStepAssembler::load(std::istream& is) {
  n_ = static_cast<int32_t>(io::get_i64(is));
  gamma_ = io::get_f64(is);
  window_.clear();
  uint64_t count = io::get_u64(is);
  for (uint64_t i = 0; i < count; ++i) {
    RawStep s;
    s.state = io::get_f64_vec(is);
    s.action = static_cast<int32_t>(io::get_i64(is));
    s.reward = io::get_f64(is);
    s.next_state = io::get_f64_vec(is);
    s.done = io::get_u8(is) != 0;
    window_.push_back(std::move(s));
  }
}

NStepAssembler::NStepAssembler(int32_t n, double gamma) : n_(n), gamma_(gamma) {
  if (n < 1) throw ParameterError("nstep: n must be >= 1");
}

void NStepAssembler::add(RawStep step, std::vector<Transition>& out) {
  bool done = step.done;
  window_.push_back(std::move(step));
  if (done) {
    while (!window_.empty()) {
      std::vector<RawStep> view(window_.begin(), window_.end());
      out.push_back(assemble_nstep(view, n_, gamma_));
      window_.pop_front();
    }
    return;
  }
  if (static_cast<int32_t>(window_.size()) == n_) {
    std::vector<RawStep> view(window_.begin(), window_.end());
    out.push_back(assemble_nstep(view, n_, gamma_));
    window_.pop_front();
  }
}

}  // namespace rrlab::replay
