#pragma once

#include "rrlab/envs/environment.hpp"
#include "rrlab/numcore/rng.hpp"

namespace rrlab::envs {

/// Layout and rewards for a deterministic 4-action gridworld.
/// Grid characters: '.' free, '#' wall, 'G' goal, 'S' optional start
/// (otherwise start_row/start_col locate it).
struct GridSpec {
  std::vector<std::string> grid;
  int64_t start_row = 0;
  int64_t start_col = 0;
  double step_reward = 0.0;
  double goal_reward = 1.0;
  int64_t max_steps = 100;
};

/// Deterministic navigation: actions {0 up, 1 down, 2 left, 3 right}, moves
/// into walls or out of bounds keep the agent in place. Observation is a
/// one-hot over cells. Reaching the goal ends the episode with the goal
/// reward added; hitting max_steps ends it without.
class GridworldEnv final : public Environment {
public:
  explicit GridworldEnv(GridSpec spec);

  std::string name() const override { return "gridworld"; }
  int64_t observation_dim() const override { return rows_ * cols_; }
  int64_t action_count() const override { return 4; }
  int64_t max_episode_steps() const override { return spec_.max_steps; }
  const GridSpec& grid_spec() const { return spec_; }
  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  bool wall(int64_t r, int64_t c) const { return spec_.grid[static_cast<size_t>(r)][static_cast<size_t>(c)] == '#'; }
  int64_t goal_cell() const { return goal_; }
  int64_t start_cell() const { return start_; }

  void reseed(uint64_t seed) override { rng_.set_state(seed); }
  std::vector<double> reset() override;
  StepResult step(int64_t action) override;
  std::unique_ptr<Environment> clone() const override;

  std::pair<double, double> return_range() const override;
  double optimal_return() const override;

  void save_state(std::ostream& os) const override;
  void load_state(std::istream& is) override;

private:
  std::vector<double> observation() const;
  int64_t cell(int64_t r, int64_t c) const { return r * cols_ + c; }

  GridSpec spec_;
  int64_t rows_ = 0;
  int64_t cols_ = 0;
  int64_t start_ = 0;
  int64_t goal_ = 0;
  int64_t goal_distance_ = 0;  // BFS steps from start
  numcore::Rng rng_{0};
  int64_t agent_ = 0;
  int64_t steps_ = 0;
  bool in_episode_ = false;
};

std::unique_ptr<Environment> make_gridworld(GridSpec spec);

}  // namespace rrlab::envs
