#include <cmath>

#include "rrlab/errors.hpp"
#include "rrlab/replay/transition.hpp"

namespace rrlab::replay {

Transition assemble_nstep(std::span<const RawStep> window, int32_t n, double gamma) {
  if (window.empty()) throw ContractViolation("nstep: empty window");
  if (n < 1) throw ParameterError("nstep: n must be >= 1");

  auto m = static_cast<size_t>(std::min<int64_t>(n, static_cast<int64_t>(window.size())));
  for (size_t j = 0; j + 1 < m; ++j)
    if (window[j].done)
      throw ContractViolation("nstep: window crosses an episode boundary");

  Transition t;
  t.state = window[0].state;
  t.action = window[0].action;
  double acc = 0.0;
  double g = 1.0;
  for (size_t j = 0; j < m; ++j) {
    acc += g * window[j].reward;
    g *= gamma;
  }
  t.reward = acc;
  t.next_state = window[m - 1].next_state;
  t.done = window[m - 1].done;
  t.n = static_cast<int32_t>(m);
  t.discount_n = g;  // gamma^m
  return t;
}

}  // namespace rrlab::replay
