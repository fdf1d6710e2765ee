#include "rrlab/agent/agent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "rrlab/errors.hpp"
#include "rrlab/io/binio.hpp"
#include "rrlab/numcore/graph.hpp"
#include "rrlab/qnet/support.hpp"

namespace rrlab::agent {

using numcore::Graph;
using numcore::NodeId;
using numcore::Tensor;
using qnet::QNetwork;

double double_q_target(double reward, double discount_n, bool done,
                       std::span<const double> q_online_next,
                       std::span<const double> q_target_next) {
  if (q_online_next.size() != q_target_next.size())
    throw DimensionError("double_q_target: online/target value lengths differ");
  if (done) return reward;
  int64_t a = qnet::argmax_action(q_online_next);
  return reward + discount_n * q_target_next[static_cast<size_t>(a)];
}

int64_t select_action(std::span<const double> obs, int64_t t, const AgentConfig& cfg,
                      QNetwork& network, numcore::Rng& action_rng, numcore::Rng& noise_rng) {
  double eps;
  if (cfg.noisy) {
    network.resample_noise(noise_rng);
    eps = cfg.eps_noisy;
  } else {
    eps = epsilon_at(t, cfg);
  }
  if (action_rng.next_double() < eps)
    return static_cast<int64_t>(
        action_rng.next_below(static_cast<uint64_t>(network.spec().actions)));
  return qnet::argmax_action(network.q_values(obs));
}

Agent::Agent(AgentConfig cfg, int64_t obs_dim, int64_t action_count,
             std::pair<double, double> return_range)
    : cfg_(std::move(cfg)), obs_dim_(obs_dim), actions_(action_count) {
  cfg_.validate_or_throw();
  if (obs_dim <= 0 || action_count <= 0)
    throw ParameterError("agent needs positive observation dim and action count");
  if (std::isnan(cfg_.v_min) || std::isnan(cfg_.v_max)) {
    cfg_.v_min = return_range.first;
    cfg_.v_max = return_range.second;
  }

  numcore::Rng master(cfg_.seed);
  numcore::Rng rng_init = master.split();
  rng_action_ = master.split();
  rng_noise_ = master.split();
  rng_replay_ = master.split();
  rng_eval_ = master.split();

  qnet::NetworkSpec nspec;
  nspec.input_dim = obs_dim_;
  nspec.hidden = cfg_.hidden;
  nspec.actions = actions_;
  nspec.noisy = cfg_.noisy;
  nspec.noisy_sigma0 = cfg_.noisy_sigma0;
  if (cfg_.categorical) {
    nspec.head = cfg_.dueling ? qnet::HeadKind::kDuelingCategorical : qnet::HeadKind::kCategorical;
    nspec.support = {cfg_.v_min, cfg_.v_max, cfg_.n_atoms};
  } else {
    nspec.head = cfg_.dueling ? qnet::HeadKind::kDueling : qnet::HeadKind::kScalar;
  }
  online_ = QNetwork(nspec, rng_init);
  target_ = online_;  // construction counts as the first sync

  buffer_ = replay::ReplayBuffer(cfg_.replay_capacity, cfg_.replay_mode, cfg_.priority_alpha,
                                 cfg_.priority_epsilon);
  buffer_.set_beta(cfg_.priority_beta_start);
  nstep_ = replay::NStepAssembler(cfg_.n_step, cfg_.gamma);
  adam_ = numcore::AdamState(
      {cfg_.learning_rate, cfg_.adam_beta1, cfg_.adam_beta2, cfg_.adam_eps});
}

int64_t Agent::act(std::span<const double> obs) {
  return select_action(obs, t_, cfg_, online_, rng_action_, rng_noise_);
}

int64_t Agent::act_greedy(std::span<const double> obs, double epsilon) {
  online_.zero_noise();
  if (rng_eval_.next_double() < epsilon)
    return static_cast<int64_t>(rng_eval_.next_below(static_cast<uint64_t>(actions_)));
  return qnet::argmax_action(online_.q_values(obs));
}

void Agent::observe(std::vector<double> obs, int64_t action, double reward,
                    std::vector<double> next_obs, bool done) {
  if (cfg_.reward_clip) reward = std::clamp(reward, -1.0, 1.0);
  replay::RawStep step;
  step.state = std::move(obs);
  step.action = static_cast<int32_t>(action);
  step.reward = reward;
  step.next_state = std::move(next_obs);
  step.done = done;
  std::vector<replay::Transition> ready;
  nstep_.add(std::move(step), ready);
  for (replay::Transition& tr : ready) buffer_.append(std::move(tr));
  ++t_;
}

void Agent::set_progress(double fraction) {
  fraction = std::clamp(fraction, 0.0, 1.0);
  buffer_.set_beta(cfg_.priority_beta_start +
                   (cfg_.priority_beta_end - cfg_.priority_beta_start) * fraction);
}

Agent::BatchTargets Agent::compute_targets(const replay::SampledBatch& batch) {
  auto b = static_cast<int64_t>(batch.transitions.size());
  Tensor next_states({b, obs_dim_});
  for (int64_t i = 0; i < b; ++i) {
    const auto& s = batch.transitions[static_cast<size_t>(i)]->next_state;
    std::copy(s.begin(), s.end(), next_states.data() + i * obs_dim_);
  }

  Tensor target_out = target_.head_output(next_states);
  Tensor online_out;
  if (cfg_.double_q) online_out = online_.head_output(next_states);
  int64_t width = target_.output_width();

  BatchTargets out;
  if (!cfg_.categorical) {
    out.scalar_targets.resize(static_cast<size_t>(b));
    for (int64_t i = 0; i < b; ++i) {
      const replay::Transition& tr = *batch.transitions[static_cast<size_t>(i)];
      std::span<const double> trow(target_out.data() + i * width, static_cast<size_t>(width));
      double y;
      if (cfg_.double_q) {
        std::span<const double> orow(online_out.data() + i * width, static_cast<size_t>(width));
        y = double_q_target(tr.reward, tr.discount_n, tr.done, orow, trow);
      } else if (tr.done) {
        y = tr.reward;
      } else {
        y = tr.reward + tr.discount_n * trow[static_cast<size_t>(qnet::argmax_action(trow))];
      }
      out.scalar_targets[static_cast<size_t>(i)] = y;
    }
    return out;
  }

  const qnet::Support& support = online_.spec().support;
  out.categorical_targets.resize(static_cast<size_t>(b * support.n_atoms));
  for (int64_t i = 0; i < b; ++i) {
    const replay::Transition& tr = *batch.transitions[static_cast<size_t>(i)];
    std::span<const double> trow(target_out.data() + i * width, static_cast<size_t>(width));
    int64_t next_a;
    if (cfg_.double_q) {
      std::span<const double> orow(online_out.data() + i * width, static_cast<size_t>(width));
      next_a = qnet::argmax_action(online_.q_values_from_output_row(orow));
    } else {
      next_a = qnet::argmax_action(target_.q_values_from_output_row(trow));
    }
    std::vector<double> next_probs = target_.probs_for_action(trow, next_a);
    std::vector<double> projected =
        qnet::categorical_project(support, next_probs, tr.reward, tr.discount_n, tr.done);
    std::copy(projected.begin(), projected.end(),
              out.categorical_targets.begin() + static_cast<size_t>(i * support.n_atoms));
  }
  return out;
}

TrainStats Agent::train_step() {
  replay::SampledBatch batch = buffer_.sample(cfg_.batch_size, rng_replay_);
  if (cfg_.noisy) {
    online_.resample_noise(rng_noise_);
    target_.resample_noise(rng_noise_);
  }
  BatchTargets targets = compute_targets(batch);

  auto b = static_cast<int64_t>(batch.transitions.size());
  Tensor states({b, obs_dim_});
  std::vector<int32_t> actions(static_cast<size_t>(b));
  for (int64_t i = 0; i < b; ++i) {
    const replay::Transition& tr = *batch.transitions[static_cast<size_t>(i)];
    std::copy(tr.state.begin(), tr.state.end(), states.data() + i * obs_dim_);
    actions[static_cast<size_t>(i)] = tr.action;
  }

  Graph g;
  std::vector<NodeId> param_nodes;
  NodeId x = g.leaf(std::move(states));
  NodeId out = online_.forward(g, x, &param_nodes);
  NodeId weights = g.leaf(Tensor::vector({batch.weights.begin(), batch.weights.end()}));

  std::vector<double> per_element_error(static_cast<size_t>(b));
  NodeId loss;
  if (!cfg_.categorical) {
    NodeId pred = g.gather_cols(out, actions);
    NodeId y = g.leaf(Tensor::vector(std::move(targets.scalar_targets)));
    NodeId delta = g.sub(pred, y);
    for (int64_t i = 0; i < b; ++i)
      per_element_error[static_cast<size_t>(i)] = std::abs(g.value(delta)[i]);
    loss = g.reduce_mean(g.mul(g.huber(delta, cfg_.huber_kappa), weights));
  } else {
    int64_t atoms = online_.spec().support.n_atoms;
    NodeId picked = g.gather_span(out, actions, atoms);
    NodeId log_probs = g.log_softmax_rows(picked);
    NodeId m = g.leaf(Tensor::matrix(b, atoms, std::move(targets.categorical_targets)));
    NodeId ce = g.scale(g.row_sum(g.mul(m, log_probs)), -1.0);
    for (int64_t i = 0; i < b; ++i)
      per_element_error[static_cast<size_t>(i)] = g.value(ce)[i];
    loss = g.reduce_mean(g.mul(ce, weights));
  }

  g.backward(loss);

  std::vector<Tensor*> params = online_.params();
  std::vector<const Tensor*> grads;
  grads.reserve(params.size());
  for (NodeId id : param_nodes) grads.push_back(&g.grad(id));
  adam_.step(params, grads);

  buffer_.update_priorities(batch.indices, per_element_error);

  ++u_;
  if (u_ % cfg_.tau_t == 0) sync_target();

  TrainStats stats;
  stats.loss = g.value(loss)[0];
  double acc = 0.0;
  for (double e : per_element_error) acc += e;
  stats.mean_abs_error = acc / static_cast<double>(b);
  return stats;
}

void Agent::sync_target() {
  // Deep copy; parameters and noise buffers end up bitwise identical, so
  // forward passes agree until either net updates or resamples.
  target_ = online_;
}

namespace {
constexpr uint32_t kAgentMagic = 0x52524147;  // "RRAG"

void put_tensors(std::ostream& os, const std::vector<const Tensor*>& tensors) {
  io::put_u64(os, tensors.size());
  for (const Tensor* t : tensors) {
    io::put_u64(os, t->shape().size());
    for (int64_t d : t->shape()) io::put_i64(os, d);
    for (double v : t->values()) io::put_f64(os, v);
  }
}

Tensor get_tensor(std::istream& is) {
  uint64_t rank = io::get_u64(is);
  std::vector<int64_t> shape(rank);
  for (auto& d : shape) d = io::get_i64(is);
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.values()) v = io::get_f64(is);
  return t;
}

void get_tensors_into(std::istream& is, const std::vector<Tensor*>& tensors) {
  uint64_t count = io::get_u64(is);
  if (count != tensors.size()) throw IoError("checkpoint parameter count mismatch");
  for (Tensor* t : tensors) {
    Tensor read = get_tensor(is);
    if (read.shape() != t->shape()) throw IoError("checkpoint parameter shape mismatch");
    *t = std::move(read);
  }
}
}  // namespace

void Agent::save(std::ostream& os) const {
  io::put_u32(os, kAgentMagic);
  io::put_u32(os, 1);
  cfg_.save(os);
  io::put_i64(os, obs_dim_);
  io::put_i64(os, actions_);
  io::put_i64(os, t_);
  io::put_i64(os, u_);
  io::put_u64(os, rng_action_.state());
  io::put_u64(os, rng_noise_.state());
  io::put_u64(os, rng_replay_.state());
  io::put_u64(os, rng_eval_.state());
  put_tensors(os, online_.params());
  put_tensors(os, target_.params());
  io::put_i64(os, adam_.step_count());
  // Moment slots are lazily created on the first update, so this list may
  // be empty in an early checkpoint.
  std::vector<const Tensor*> moments;
  for (const Tensor& m : adam_.first_moments()) moments.push_back(&m);
  for (const Tensor& v : adam_.second_moments()) moments.push_back(&v);
  put_tensors(os, moments);
  buffer_.save(os);
  nstep_.save(os);
}

void Agent::load(std::istream& is) {
  io::expect_magic(is, kAgentMagic, "agent checkpoint");
  if (io::get_u32(is) != 1) throw IoError("unsupported agent checkpoint version");
  AgentConfig cfg = AgentConfig::load(is);
  int64_t obs_dim = io::get_i64(is);
  int64_t actions = io::get_i64(is);
  if (!(cfg == cfg_) || obs_dim != obs_dim_ || actions != actions_)
    throw IoError("checkpoint does not match the constructed agent configuration");
  t_ = io::get_i64(is);
  u_ = io::get_i64(is);
  rng_action_.set_state(io::get_u64(is));
  rng_noise_.set_state(io::get_u64(is));
  rng_replay_.set_state(io::get_u64(is));
  rng_eval_.set_state(io::get_u64(is));
  get_tensors_into(is, online_.params());
  get_tensors_into(is, target_.params());
  int64_t adam_t = io::get_i64(is);
  adam_ = numcore::AdamState(
      {cfg_.learning_rate, cfg_.adam_beta1, cfg_.adam_beta2, cfg_.adam_eps});
  uint64_t moment_count = io::get_u64(is);
  if (moment_count % 2 != 0) throw IoError("checkpoint moment list must pair up");
  auto& m = adam_.first_moments();
  auto& v = adam_.second_moments();
  for (uint64_t i = 0; i < moment_count / 2; ++i) m.push_back(get_tensor(is));
  for (uint64_t i = 0; i < moment_count / 2; ++i) v.push_back(get_tensor(is));
  adam_.set_step_count(adam_t);
  buffer_ = replay::ReplayBuffer::load(is);
  nstep_.load(is);
}

}  // namespace rrlab::agent
