#pragma once

#include <cstdint>
#include <vector>

namespace rrlab::metrics {

struct CurvePoint {
  int64_t interactions = 0;
  double eval_return = 0.0;

  bool operator==(const CurvePoint&) const = default;
};

/// Evaluation returns indexed by interaction count, strictly increasing.
class LearningCurve {
public:
  LearningCurve() = default;
  explicit LearningCurve(std::vector<CurvePoint> points);

  void append(int64_t interactions, double eval_return);
  const std::vector<CurvePoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  const CurvePoint& back() const { return points_.back(); }

  bool operator==(const LearningCurve&) const = default;

private:
  std::vector<CurvePoint> points_;
};

}  // namespace rrlab::metrics
