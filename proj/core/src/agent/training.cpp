#include "rrlab/agent/training.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "rrlab/errors.hpp"
#include "rrlab/io/binio.hpp"

namespace rrlab::agent {

TrainingRun::TrainingRun(AgentConfig cfg, std::unique_ptr<envs::Environment> env,
                         int64_t max_interactions, int64_t eval_cadence)
    : cfg_(std::move(cfg)), env_(std::move(env)), max_interactions_(max_interactions),
      eval_cadence_(eval_cadence) {
  std::vector<std::string> problems = cfg_.validate();
  if (max_interactions_ <= cfg_.warmup)
    problems.push_back("max_interactions must exceed warmup");
  if (eval_cadence_ < 1) problems.push_back("eval cadence must be >= 1");
  if (!problems.empty()) throw ValidationError(std::move(problems));

  agent_ = std::make_unique<Agent>(cfg_, env_->observation_dim(), env_->action_count(),
                                   env_->return_range());
  cfg_ = agent_->config();  // v_min/v_max materialized from the env range
  numcore::Rng env_seed(cfg_.seed);
  env_->reseed(env_seed.next_u64() ^ 0x656e76u);  // distinct from the agent's split streams
  pending_obs_ = env_->reset();
}

void TrainingRun::run(std::optional<int64_t> stop_after) {
  while (agent_->interactions() < max_interactions_) {
    int64_t s = agent_->interactions();
    int64_t a = agent_->act(pending_obs_);
    envs::StepResult res = env_->step(a);
    agent_->observe(std::move(pending_obs_), a, res.reward, res.observation, res.done);
    pending_obs_ = res.done ? env_->reset() : std::move(res.observation);
    agent_->set_progress(static_cast<double>(s + 1) / static_cast<double>(max_interactions_));

    if (s >= cfg_.warmup && s % cfg_.tau_u == 0) {
      for (int64_t i = 0; i < cfg_.k; ++i) {
        TrainStats stats = agent_->train_step();
        loss_sum_ += stats.loss;
        ++loss_count_;
      }
      expected_updates_ += cfg_.k;
      // Continuous accounting audit: u must equal k * |{s' in [W, t) :
      // s' mod tau_u == 0}| at all times.
      if (agent_->updates() != expected_updates_)
        throw Error("update accounting violated: counter " + std::to_string(agent_->updates()) +
                    " vs audit " + std::to_string(expected_updates_));
    }

    int64_t done_interactions = s + 1;
    if (done_interactions % eval_cadence_ == 0 || done_interactions == max_interactions_) {
      evaluate();
      if (stop_after && done_interactions >= *stop_after &&
          done_interactions < max_interactions_)
        return;
    }
  }
}

void TrainingRun::evaluate() {
  std::unique_ptr<envs::Environment> eval_env = env_->clone();
  eval_env->reseed(agent_->draw_eval_seed());
  double total = 0.0;
  for (int64_t e = 0; e < cfg_.eval_episodes; ++e) {
    std::vector<double> obs = eval_env->reset();
    double ret = 0.0;
    while (true) {
      int64_t a = agent_->act_greedy(obs, cfg_.eps_eval);
      envs::StepResult res = eval_env->step(a);
      ret += res.reward;
      if (res.done) break;
      obs = std::move(res.observation);
    }
    total += ret;
  }
  EvalPoint p;
  p.interactions = agent_->interactions();
  p.mean_return = total / static_cast<double>(cfg_.eval_episodes);
  p.epsilon = cfg_.noisy ? cfg_.eps_noisy : agent_->epsilon_now();
  p.updates = agent_->updates();
  p.loss_mean = loss_count_ ? loss_sum_ / static_cast<double>(loss_count_) : 0.0;
  eval_points_.push_back(p);
  loss_sum_ = 0.0;
  loss_count_ = 0;
}

metrics::LearningCurve TrainingRun::curve() const {
  metrics::LearningCurve c;
  for (const EvalPoint& p : eval_points_) c.append(p.interactions, p.mean_return);
  return c;
}

namespace {
constexpr uint32_t kRunMagic = 0x5252434b;  // "RRCK"
}

void TrainingRun::save(std::ostream& os) const {
  io::put_u32(os, kRunMagic);
  io::put_u32(os, 1);
  io::put_i64(os, max_interactions_);
  io::put_i64(os, eval_cadence_);
  agent_->save(os);
  std::ostringstream env_state;
  env_->save_state(env_state);
  io::put_string(os, env_state.str());
  io::put_f64_vec(os, pending_obs_);
  io::put_f64(os, loss_sum_);
  io::put_i64(os, loss_count_);
  io::put_i64(os, expected_updates_);
  io::put_u64(os, eval_points_.size());
  for (const EvalPoint& p : eval_points_) {
    io::put_i64(os, p.interactions);
    io::put_f64(os, p.mean_return);
    io::put_f64(os, p.epsilon);
    io::put_i64(os, p.updates);
    io::put_f64(os, p.loss_mean);
  }
}

TrainingRun TrainingRun::load(std::istream& is, std::unique_ptr<envs::Environment> env) {
  io::expect_magic(is, kRunMagic, "training checkpoint");
  if (io::get_u32(is) != 1) throw IoError("unsupported training checkpoint version");
  TrainingRun run;
  run.max_interactions_ = io::get_i64(is);
  run.eval_cadence_ = io::get_i64(is);

  // The agent reconstructs itself from the embedded config; peek at it by
  // loading into a minimal agent built from the stored config.
  auto pos = is.tellg();
  io::expect_magic(is, 0x52524147, "agent checkpoint");
  io::get_u32(is);
  AgentConfig cfg = AgentConfig::load(is);
  int64_t obs_dim = io::get_i64(is);
  int64_t actions = io::get_i64(is);
  is.seekg(pos);

  if (obs_dim != env->observation_dim() || actions != env->action_count())
    throw IoError("checkpoint environment dimensions do not match the provided environment");

  run.cfg_ = cfg;
  run.env_ = std::move(env);
  run.agent_ = std::make_unique<Agent>(cfg, obs_dim, actions, run.env_->return_range());
  run.agent_->load(is);
  std::string env_state = io::get_string(is);
  std::istringstream env_in(env_state);
  run.env_->load_state(env_in);
  run.pending_obs_ = io::get_f64_vec(is);
  run.loss_sum_ = io::get_f64(is);
  run.loss_count_ = io::get_i64(is);
  run.expected_updates_ = io::get_i64(is);
  uint64_t points = io::get_u64(is);
  for (uint64_t i = 0; i < points; ++i) {
    EvalPoint p;
    p.interactions = io::get_i64(is);
    p.mean_return = io::get_f64(is);
    p.epsilon = io::get_f64(is);
    p.updates = io::get_i64(is);
    p.loss_mean = io::get_f64(is);
    run.eval_points_.push_back(p);
  }
  return run;
}

TrainingResult run_training(AgentConfig cfg, std::unique_ptr<envs::Environment> env,
                            int64_t max_interactions, int64_t eval_cadence) {
  TrainingRun run(std::move(cfg), std::move(env), max_interactions, eval_cadence);
  run.run();
  TrainingResult result;
  result.curve = run.curve();
  result.eval_points = run.eval_points();
  result.interactions = run.agent().interactions();
  result.updates = run.agent().updates();
  return result;
}

}  // namespace rrlab::agent
