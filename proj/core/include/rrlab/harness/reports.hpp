#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rrlab/harness/experiment.hpp"
#include "rrlab/metrics/evaluation.hpp"

namespace rrlab::harness {

// Maps a requested update ratio onto the (k, tau_u) lattice: integer ratios
// become (r, 1), unit fractions become (1, 1/r). Anything else (e.g. 0.3)
// throws ParameterError naming the nearest realizable ratios on both sides.
std::pair<int64_t, int64_t> realize_ratio(double r);

struct RatioPoint {
  double requested_r = 0.0;
  int64_t k = 1;
  int64_t tau_u = 1;
  double median_reach = 0.0;        // median over seeds, interactions
  bool any_clipped = false;         // some seed never reached the threshold
  double median_final_return = 0.0;
  double median_final_normalized = 0.0;  // vs random/optimal proxy baselines
  std::vector<RunArtifact> runs;
};

struct SweepReport {
  double threshold = 0.0;
  double random_baseline = 0.0;
  double optimal_proxy = 0.0;
  std::vector<RatioPoint> points;
};

// Runs the base experiment at each requested ratio (out_dir/r_<value>/...)
// and aggregates reach statistics; writes sweep_report.{csv,json} under the
// base out_dir.
SweepReport sweep_ratio(const ExperimentSpec& base, std::span<const double> r_values,
                        const RunOptions& opts = {});

struct CellCheck {
  std::string game;
  std::string algorithm;
  int64_t interactions = 0;
  double expected = 0.0;
  double computed = 0.0;
  bool pass = false;
};

struct MedianCheck {
  std::string algorithm;
  int64_t interactions = 0;
  double expected = 0.0;
  double computed = 0.0;
  bool pass = false;
};

struct TableReport {
  std::vector<CellCheck> cells;
  std::vector<MedianCheck> medians;
  double margin_over_baseline = 0.0;  // leading approach median minus reference median
  bool margin_pass = false;           // margin exceeds 10 percentage points
  metrics::NormalizedTable table;

  bool all_pass() const;
};

// Recomputes the normalized-score table from the raw score and baseline
// fixtures and compares every percentage and median against the golden CSVs
// at 0.005pp after 2-decimal rounding. Expects in fixtures_dir:
//   table3_scores.csv, baselines.csv, table4_normalized.csv,
//   table4_medians.csv
TableReport reproduce_tables(const std::string& fixtures_dir);

// Emission helpers for normalized tables and reports.
std::string normalized_table_csv(const metrics::NormalizedTable& table);
std::string normalized_table_json(const metrics::NormalizedTable& table);
std::string table_report_csv(const TableReport& report);
std::string table_report_json(const TableReport& report);

}  // namespace rrlab::harness
