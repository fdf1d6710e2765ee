#include "rrlab/envs/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>

#include "rrlab/errors.hpp"
#include "rrlab/io/binio.hpp"

namespace rrlab::envs {

GridworldEnv::GridworldEnv(GridSpec spec) : spec_(std::move(spec)) {
  std::vector<std::string> problems;
  rows_ = static_cast<int64_t>(spec_.grid.size());
  cols_ = rows_ ? static_cast<int64_t>(spec_.grid[0].size()) : 0;
  if (rows_ == 0 || cols_ == 0) problems.push_back("grid must be non-empty");
  for (const auto& row : spec_.grid)
    if (static_cast<int64_t>(row.size()) != cols_) problems.push_back("grid rows differ in length");

  int64_t goals = 0;
  bool start_in_grid = false;
  if (problems.empty()) {
    for (int64_t r = 0; r < rows_; ++r) {
      for (int64_t c = 0; c < cols_; ++c) {
        char ch = spec_.grid[static_cast<size_t>(r)][static_cast<size_t>(c)];
        if (ch == 'G') {
          goal_ = cell(r, c);
          ++goals;
        } else if (ch == 'S') {
          spec_.start_row = r;
          spec_.start_col = c;
          start_in_grid = true;
        } else if (ch != '.' && ch != '#') {
          problems.push_back(std::string("unknown grid character '") + ch + "'");
        }
      }
    }
    if (goals != 1) problems.push_back("grid must contain exactly one goal 'G'");
    if (spec_.start_row < 0 || spec_.start_row >= rows_ || spec_.start_col < 0 ||
        spec_.start_col >= cols_) {
      problems.push_back("start cell out of bounds");
    } else {
      char ch = spec_.grid[static_cast<size_t>(spec_.start_row)][static_cast<size_t>(spec_.start_col)];
      if (ch == '#') problems.push_back("start cell is a wall");
      if (ch == 'G') problems.push_back("start cell is the goal");
      if (!start_in_grid && ch != '.') problems.push_back("start cell must be free");
    }
    if (spec_.max_steps < 1) problems.push_back("max_steps must be >= 1");
  }

  if (problems.empty()) {
    start_ = cell(spec_.start_row, spec_.start_col);
    // BFS from start; the goal must be reachable within the step budget.
    std::vector<int64_t> dist(static_cast<size_t>(rows_ * cols_), -1);
    std::deque<int64_t> queue{start_};
    dist[static_cast<size_t>(start_)] = 0;
    while (!queue.empty()) {
      int64_t s = queue.front();
      queue.pop_front();
      int64_t r = s / cols_, c = s % cols_;
      const int64_t dr[4] = {-1, 1, 0, 0};
      const int64_t dc[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        int64_t nr = r + dr[k], nc = c + dc[k];
        if (nr < 0 || nr >= rows_ || nc < 0 || nc >= cols_ || wall(nr, nc)) continue;
        int64_t ns = cell(nr, nc);
        if (dist[static_cast<size_t>(ns)] == -1) {
          dist[static_cast<size_t>(ns)] = dist[static_cast<size_t>(s)] + 1;
          queue.push_back(ns);
        }
      }
    }
    goal_distance_ = dist[static_cast<size_t>(goal_)];
    if (goal_distance_ < 0) problems.push_back("goal is unreachable from start");
    else if (goal_distance_ > spec_.max_steps)
      problems.push_back("goal is unreachable within max_steps");
  }

  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::vector<double> GridworldEnv::reset() {
  agent_ = start_;
  steps_ = 0;
  in_episode_ = true;
  return observation();
}

StepResult GridworldEnv::step(int64_t action) {
  if (!in_episode_) throw ContractViolation("gridworld: step after episode end; reset first");
  if (action < 0 || action >= 4) throw ContractViolation("gridworld: action must be in [0,4)");

  const int64_t dr[4] = {-1, 1, 0, 0};
  const int64_t dc[4] = {0, 0, -1, 1};
  int64_t r = agent_ / cols_ + dr[action];
  int64_t c = agent_ % cols_ + dc[action];
  if (r >= 0 && r < rows_ && c >= 0 && c < cols_ && !wall(r, c)) agent_ = cell(r, c);
  ++steps_;

  StepResult res;
  res.reward = spec_.step_reward;
  if (agent_ == goal_) {
    res.reward += spec_.goal_reward;
    res.done = true;
  } else if (steps_ >= spec_.max_steps) {
    res.done = true;
  }
  if (res.done) in_episode_ = false;
  res.observation = observation();
  return res;
}

std::vector<double> GridworldEnv::observation() const {
  std::vector<double> obs(static_cast<size_t>(rows_ * cols_), 0.0);
  obs[static_cast<size_t>(agent_)] = 1.0;
  return obs;
}

std::pair<double, double> GridworldEnv::return_range() const {
  double steps = static_cast<double>(spec_.max_steps);
  double lo = std::min(0.0, spec_.step_reward) * steps + std::min(0.0, spec_.goal_reward);
  double hi = std::max(0.0, spec_.step_reward) * steps + std::max(0.0, spec_.goal_reward);
  if (lo == hi) hi = lo + 1.0;
  return {lo, hi};
}

double GridworldEnv::optimal_return() const {
  return spec_.goal_reward + spec_.step_reward * static_cast<double>(goal_distance_);
}

std::unique_ptr<Environment> GridworldEnv::clone() const {
  return std::make_unique<GridworldEnv>(*this);
}

void GridworldEnv::save_state(std::ostream& os) const {
  io::put_u64(os, rng_.state());
  io::put_i64(os, agent_);
  io::put_i64(os, steps_);
  io::put_u8(os, in_episode_ ? 1 : 0);
}

void GridworldEnv::load_state(std::istream& is) {
  rng_.set_state(io::get_u64(is));
  agent_ = io::get_i64(is);
  steps_ = io::get_i64(is);
  in_episode_ = io::get_u8(is) != 0;
}

std::unique_ptr<Environment> make_gridworld(GridSpec spec) {
  return std::make_unique<GridworldEnv>(std::move(spec));
}

}  // namespace rrlab::envs
