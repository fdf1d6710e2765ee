#pragma once

#include "rrlab/envs/environment.hpp"
#include "rrlab/numcore/rng.hpp"

namespace rrlab::envs {

/// Catch: a ball drops one row per step from a random top column; the paddle
/// on the bottom row moves {left, stay, right}. The episode ends when the
/// ball reaches the bottom row, with reward +1 on a catch and -1 on a miss.
/// Observation is the flattened ball plane followed by the paddle plane
/// (2 * height * width values in {0, 1}).
class CatchEnv final : public Environment {
public:
  CatchEnv(int64_t width, int64_t height);

  std::string name() const override { return "catch"; }
  int64_t observation_dim() const override { return 2 * width_ * height_; }
  int64_t action_count() const override { return 3; }
  int64_t max_episode_steps() const override { return height_ - 1; }
  int64_t width() const { return width_; }
  int64_t height() const { return height_; }

  void reseed(uint64_t seed) override { rng_.set_state(seed); }
  std::vector<double> reset() override;
  StepResult step(int64_t action) override;
  std::unique_ptr<Environment> clone() const override;

  std::pair<double, double> return_range() const override { return {-1.0, 1.0}; }
  double optimal_return() const override;

  void save_state(std::ostream& os) const override;
  void load_state(std::istream& is) override;

private:
  std::vector<double> observation() const;

  int64_t width_ = 0;
  int64_t height_ = 0;
  numcore::Rng rng_{0};
  int64_t ball_row_ = 0;
  int64_t ball_col_ = 0;
  int64_t paddle_col_ = 0;
  bool in_episode_ = false;
};

std::unique_ptr<Environment> make_catch(int64_t width = 5, int64_t height = 10);

}  // namespace rrlab::envs
