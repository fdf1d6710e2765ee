#pragma once

#include <memory>
#include <optional>
#include <string>

#include "rrlab/envs/catch_env.hpp"
#include "rrlab/envs/environment.hpp"
#include "rrlab/envs/gridworld.hpp"

namespace rrlab::envs {

/// Parsed environment spec file (JSON). Validates eagerly; instantiate()
/// builds a fresh unseeded environment. canonical_json() re-emits the spec
/// with every default materialized, in stable key order.
class EnvSpec {
public:
  static EnvSpec parse(const std::string& json_text);
  static EnvSpec load_file(const std::string& path);

  const std::string& type() const { return type_; }
  double solve_threshold() const { return solve_threshold_; }
  std::string canonical_json() const;
  std::unique_ptr<Environment> instantiate() const;

private:
  std::string type_;
  double solve_threshold_ = 0.0;
  // catch
  int64_t width_ = 5;
  int64_t height_ = 10;
  // gridworld
  std::optional<GridSpec> grid_;
};

}  // namespace rrlab::envs
