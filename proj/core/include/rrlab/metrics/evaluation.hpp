#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rrlab/metrics/curve.hpp"
#include "rrlab/metrics/scores.hpp"

namespace rrlab::metrics {

// 100 * (score - random) / (human - random). May be negative or above 100.
double human_normalized(double score, double random_score, double human_score);

// Midpoint rule: an even count yields the mean of the two central values.
double median(std::vector<double> values);

struct NormalizedRow {
  std::string game;
  std::string algorithm;
  int64_t interactions = 0;
  double percent = 0.0;
};

struct NormalizedSummary {
  std::string algorithm;
  int64_t interactions = 0;
  double median_percent = 0.0;
  double mean_percent = 0.0;
  int64_t games = 0;
};

struct NormalizedTable {
  std::vector<NormalizedRow> rows;
  std::vector<NormalizedSummary> summaries;  // one per (algorithm, interactions)
};

// Applies human_normalized per game and aggregates per approach. Every game
// must have a baseline row.
NormalizedTable normalized_table(std::span<const ScoreRecord> scores,
                                 std::span<const BaselineRow> baselines);

// r = k * (real + simulated) / real / tau_u: gradient updates per real
// environment interaction, counting simulated experience against the real
// data that produced it.
double update_ratio(double real_steps, double simulated_steps, int64_t tau_u, int64_t k);

struct ReachResult {
  double interactions = 0.0;
  bool clipped = false;  // set when clamped to either edge or never reached
};

// Smallest interaction count at which the curve attains target_score, with
// linear interpolation between bracketing evaluation points. A target the
// curve never reaches yields clip_high, flagged.
ReachResult interactions_to_reach(const LearningCurve& curve, double target_score,
                                  double clip_low = 20000.0, double clip_high = 500000.0);

// 100 * a / b.
double relative_score(double a, double b);

}  // namespace rrlab::metrics
