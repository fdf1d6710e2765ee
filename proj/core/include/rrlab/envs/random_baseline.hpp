#pragma once

#include <cstdint>

#include "rrlab/envs/environment.hpp"

namespace rrlab::envs {

struct BaselineResult {
  double mean = 0.0;
  double std_error = 0.0;  // standard error of the mean
  int64_t episodes = 0;
};

// Mean undiscounted return of the uniform-random policy over the given
// number of episodes. Deterministic for a fixed seed.
BaselineResult random_agent_baseline(Environment& env, int64_t episodes, uint64_t seed);

}  // namespace rrlab::envs
