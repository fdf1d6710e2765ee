#pragma once

#include <deque>
#include <iosfwd>
#include <vector>

#include "rrlab/replay/transition.hpp"

namespace rrlab::replay {

/// Incremental n-step aggregation. Feed raw steps in order; completed
/// transitions come out once the window holds n steps, and an episode end
/// flushes every pending window (with the truncated horizon rule of
/// assemble_nstep).
class NStepAssembler {
public:
  NStepAssembler() = default;
  NStepAssembler(int32_t n, double gamma);

  void add(RawStep step, std::vector<Transition>& out);
  void clear() { window_.clear(); }
  const std::deque<RawStep>& window() const { return window_; }
  int32_t n() const { return n_; }

  void save(std::ostream& os) const;
  void load(std::istream& is);

private:
  int32_t n_ = 1;
  double gamma_ = 0.99;
  std::deque<RawStep> window_;
};

}  // namespace rrlab::replay
