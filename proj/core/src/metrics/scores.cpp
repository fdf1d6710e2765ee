#include "rrlab/metrics/scores.hpp"

#include <cstdlib>

#include "rrlab/errors.hpp"
#include "rrlab/metrics/csv.hpp"

namespace rrlab::metrics {

namespace {
double to_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw IoError(what + ": not a number: \"" + s + "\"");
  return v;
}

int64_t to_int(const std::string& s, const std::string& what) {
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') throw IoError(what + ": not an integer: \"" + s + "\"");
  return static_cast<int64_t>(v);
}
}  // namespace

std::vector<ScoreRecord> read_scores_csv(const std::string& path) {
  auto rows = read_csv_file(path, "game,algorithm,interactions,score");
  std::vector<ScoreRecord> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    ScoreRecord rec;
    rec.game = r[0];
    rec.algorithm = r[1];
    rec.interactions = to_int(r[2], path);
    if (rec.interactions < 0) throw IoError(path + ": interactions must be >= 0");
    rec.score = to_double(r[3], path);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<BaselineRow> read_baselines_csv(const std::string& path) {
  auto rows = read_csv_file(path, "game,random,human");
  std::vector<BaselineRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    BaselineRow rec;
    rec.game = r[0];
    rec.random_score = to_double(r[1], path);
    rec.human_score = to_double(r[2], path);
    if (rec.human_score == rec.random_score)
      throw IoError(path + ": human and random scores coincide for " + rec.game);
    out.push_back(std::move(rec));
  }
  return out;
}

const BaselineRow& find_baseline(std::span<const BaselineRow> baselines, const std::string& game) {
  for (const BaselineRow& b : baselines)
    if (b.game == game) return b;
  throw KeyError(game, "no baseline row for game");
}

}  // namespace rrlab::metrics
