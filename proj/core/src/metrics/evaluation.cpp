#include "rrlab/metrics/evaluation.hpp"

#include <algorithm>

#include "rrlab/errors.hpp"

namespace rrlab::metrics {

LearningCurve::LearningCurve(std::vector<CurvePoint> points) {
  for (const CurvePoint& p : points) append(p.interactions, p.eval_return);
}

void LearningCurve::append(int64_t interactions, double eval_return) {
  if (!points_.empty() && interactions <= points_.back().interactions)
    throw ContractViolation("learning curve interactions must be strictly increasing");
  points_.push_back({interactions, eval_return});
}

double human_normalized(double score, double random_score, double human_score) {
  if (human_score == random_score)
    throw ParameterError("human and random baselines coincide; normalization undefined");
  return 100.0 * (score - random_score) / (human_score - random_score);
}

double median(std::vector<double> values) {
  if (values.empty()) throw ParameterError("median of empty list");
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

NormalizedTable normalized_table(std::span<const ScoreRecord> scores,
                                 std::span<const BaselineRow> baselines) {
  NormalizedTable table;
  table.rows.reserve(scores.size());
  for (const ScoreRecord& s : scores) {
    const BaselineRow& b = find_baseline(baselines, s.game);
    table.rows.push_back(
        {s.game, s.algorithm, s.interactions,
         human_normalized(s.score, b.random_score, b.human_score)});
  }

  // One summary per approach, in first-appearance order.
  for (const NormalizedRow& row : table.rows) {
    bool seen = false;
    for (const NormalizedSummary& s : table.summaries)
      if (s.algorithm == row.algorithm && s.interactions == row.interactions) seen = true;
    if (seen) continue;
    std::vector<double> percents;
    for (const NormalizedRow& r : table.rows)
      if (r.algorithm == row.algorithm && r.interactions == row.interactions)
        percents.push_back(r.percent);
    NormalizedSummary sum;
    sum.algorithm = row.algorithm;
    sum.interactions = row.interactions;
    sum.games = static_cast<int64_t>(percents.size());
    double mean = 0.0;
    for (double p : percents) mean += p;
    sum.mean_percent = mean / static_cast<double>(percents.size());
    sum.median_percent = median(std::move(percents));
    table.summaries.push_back(std::move(sum));
  }
  return table;
}

double update_ratio(double real_steps, double simulated_steps, int64_t tau_u, int64_t k) {
  if (!(real_steps > 0.0)) throw ParameterError("update_ratio: real_steps must be positive");
  if (simulated_steps < 0.0) throw ParameterError("update_ratio: simulated_steps must be >= 0");
  if (tau_u < 1 || k < 1) throw ParameterError("update_ratio: tau_u and k must be >= 1");
  return static_cast<double>(k) * ((real_steps + simulated_steps) / real_steps) /
         static_cast<double>(tau_u);
}

ReachResult interactions_to_reach(const LearningCurve& curve, double target_score,
                                  double clip_low, double clip_high) {
  if (curve.empty()) throw ContractViolation("interactions_to_reach: empty curve");
  if (!(clip_low < clip_high))
    throw ContractViolation("interactions_to_reach: clip_low must be < clip_high");

  const auto& pts = curve.points();
  ReachResult res;
  bool reached = false;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].eval_return >= target_score) {
      if (i == 0) {
        res.interactions = static_cast<double>(pts[0].interactions);
      } else {
        double x0 = static_cast<double>(pts[i - 1].interactions);
        double x1 = static_cast<double>(pts[i].interactions);
        double y0 = pts[i - 1].eval_return;
        double y1 = pts[i].eval_return;
        res.interactions = x0 + (target_score - y0) * (x1 - x0) / (y1 - y0);
      }
      reached = true;
      break;
    }
  }
  if (!reached) {
    res.interactions = clip_high;
    res.clipped = true;
    return res;
  }
  if (res.interactions < clip_low) {
    res.interactions = clip_low;
    res.clipped = true;
  } else if (res.interactions > clip_high) {
    res.interactions = clip_high;
    res.clipped = true;
  }
  return res;
}

double relative_score(double a, double b) {
  if (b == 0.0) throw ParameterError("relative_score: reference score is zero");
  return 100.0 * a / b;
}

}  // namespace rrlab::metrics
