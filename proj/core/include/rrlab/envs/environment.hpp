#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace rrlab::envs {

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

/// Seeded episodic environment with vector observations and a discrete
/// action set. reset(seed) followed by an identical action sequence must
/// reproduce identical observations, rewards and termination; all internal
/// randomness comes from the splitmix64 generator so runs replay across
/// platforms. Instances are single-threaded and independent.
class Environment {
public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int64_t observation_dim() const = 0;
  virtual int64_t action_count() const = 0;
  virtual int64_t max_episode_steps() const = 0;

  virtual void reseed(uint64_t seed) = 0;
  virtual std::vector<double> reset() = 0;
  // Throws ContractViolation if called after done without a reset.
  virtual StepResult step(int64_t action) = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

  // Conservative bounds on the undiscounted episode return, used to scale
  // distributional value supports.
  virtual std::pair<double, double> return_range() const = 0;
  // Optimal-policy expected return; stands in for a human baseline when
  // normalizing scores.
  virtual double optimal_return() const = 0;

  // Full internal state (including the generator) for checkpoint/resume.
  virtual void save_state(std::ostream& os) const = 0;
  virtual void load_state(std::istream& is) = 0;
};

}  // namespace rrlab::envs
