#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rrlab::replay {

/// One (possibly n-step aggregated) experience tuple. reward carries the
/// discounted sum over the aggregated horizon and discount_n = gamma^n_eff
/// is the bootstrap factor for next_state.
struct Transition {
  std::vector<double> state;
  int32_t action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
  int32_t n = 1;             // horizon actually aggregated
  double discount_n = 1.0;   // gamma^n

  bool operator==(const Transition&) const = default;
};

/// A raw single environment step before n-step aggregation.
struct RawStep {
  std::vector<double> state;
  int32_t action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// Collapse the front of a within-episode window into one transition:
// reward = sum_{j<m} gamma^j r_j with m = min(n, steps until episode end),
// next_state taken after m steps, discount_n = gamma^m, done set when the
// episode terminated inside the window. A done step anywhere except the end
// of the aggregated range violates the single-episode contract.
Transition assemble_nstep(std::span<const RawStep> window, int32_t n, double gamma);

}  // namespace rrlab::replay
