#include "rrlab/envs/random_baseline.hpp"

#include <cmath>

#include "rrlab/errors.hpp"
#include "rrlab/numcore/rng.hpp"

namespace rrlab::envs {

BaselineResult random_agent_baseline(Environment& env, int64_t episodes, uint64_t seed) {
  if (episodes < 1) throw ParameterError("baseline needs at least one episode");
  numcore::Rng rng(seed);
  env.reseed(rng.next_u64());
  auto actions = static_cast<uint64_t>(env.action_count());

  double sum = 0.0, sum_sq = 0.0;
  for (int64_t e = 0; e < episodes; ++e) {
    env.reset();
    double ret = 0.0;
    while (true) {
      StepResult r = env.step(static_cast<int64_t>(rng.next_below(actions)));
      ret += r.reward;
      if (r.done) break;
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  BaselineResult out;
  out.episodes = episodes;
  out.mean = sum / static_cast<double>(episodes);
  if (episodes > 1) {
    double var = (sum_sq - sum * out.mean) / static_cast<double>(episodes - 1);
    out.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(episodes));
  }
  return out;
}

}  // namespace rrlab::envs
