#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rrlab::metrics {

struct ScoreRecord {
  std::string game;
  std::string algorithm;
  int64_t interactions = 0;
  double score = 0.0;
};

struct BaselineRow {
  std::string game;
  double random_score = 0.0;
  double human_score = 0.0;
};

// CSV header: game,algorithm,interactions,score
std::vector<ScoreRecord> read_scores_csv(const std::string& path);
// CSV header: game,random,human
std::vector<BaselineRow> read_baselines_csv(const std::string& path);

// Throws KeyError naming the game when absent.
const BaselineRow& find_baseline(std::span<const BaselineRow> baselines, const std::string& game);

}  // namespace rrlab::metrics
