#include "rrlab/envs/catch_env.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "rrlab/errors.hpp"
#include "rrlab/io/binio.hpp"

namespace rrlab::envs {

CatchEnv::CatchEnv(int64_t width, int64_t height) : width_(width), height_(height) {
  if (width < 2 || height < 2)
    throw ParameterError("catch: width and height must both be >= 2");
}

std::vector<double> CatchEnv::reset() {
  ball_row_ = 0;
  ball_col_ = static_cast<int64_t>(rng_.next_below(static_cast<uint64_t>(width_)));
  paddle_col_ = width_ / 2;
  in_episode_ = true;
  return observation();
}

StepResult CatchEnv::step(int64_t action) {
  if (!in_episode_) throw ContractViolation("catch: step after episode end; reset first");
  if (action < 0 || action >= 3) throw ContractViolation("catch: action must be in {0,1,2}");

  paddle_col_ = std::clamp(paddle_col_ + (action - 1), int64_t{0}, width_ - 1);
  ball_row_ += 1;

  StepResult r;
  if (ball_row_ == height_ - 1) {
    r.reward = ball_col_ == paddle_col_ ? 1.0 : -1.0;
    r.done = true;
    in_episode_ = false;
  }
  r.observation = observation();
  return r;
}

std::vector<double> CatchEnv::observation() const {
  std::vector<double> obs(static_cast<size_t>(2 * width_ * height_), 0.0);
  obs[static_cast<size_t>(ball_row_ * width_ + ball_col_)] = 1.0;
  obs[static_cast<size_t>(width_ * height_ + (height_ - 1) * width_ + paddle_col_)] = 1.0;
  return obs;
}

double CatchEnv::optimal_return() const {
  // The paddle starts at width/2 and moves one column per step; a ball in
  // column c is catchable iff |c - start| <= height - 1.
  int64_t start = width_ / 2;
  int64_t catchable = 0;
  for (int64_t c = 0; c < width_; ++c)
    if (std::abs(c - start) <= height_ - 1) ++catchable;
  double p = static_cast<double>(catchable) / static_cast<double>(width_);
  return 2.0 * p - 1.0;
}

std::unique_ptr<Environment> CatchEnv::clone() const { return std::make_unique<CatchEnv>(*this); }

void CatchEnv::save_state(std::ostream& os) const {
  io::put_u64(os, rng_.state());
  io::put_i64(os, ball_row_);
  io::put_i64(os, ball_col_);
  io::put_i64(os, paddle_col_);
  io::put_u8(os, in_episode_ ? 1 : 0);
}

void CatchEnv::load_state(std::istream& is) {
  rng_.set_state(io::get_u64(is));
  ball_row_ = io::get_i64(is);
  ball_col_ = io::get_i64(is);
  paddle_col_ = io::get_i64(is);
  in_episode_ = io::get_u8(is) != 0;
}

std::unique_ptr<Environment> make_catch(int64_t width, int64_t height) {
  return std::make_unique<CatchEnv>(width, height);
}

}  // namespace rrlab::envs
