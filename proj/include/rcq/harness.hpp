#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcq/geometry.hpp"
#include "rcq/point_set.hpp"

namespace rcq {

/// Independent stream for trial `trial` of a run seeded with `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Uniform points in [Δ]^d.
PointSet random_instance(int dim, Coord delta, std::int64_t n_red, std::int64_t n_blue,
                         std::int64_t n_plain, Rng& rng);

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  /// emd1d | emd2d | emd3d | mst | cells
  std::string family = "emd1d";
  /// Fixed instance for every trial; random instances otherwise.
  std::string instance_path;
  std::int64_t n = 1024;
  Coord delta = 0;
  /// s for EMD, eps for MST, cell side for cells.
  std::vector<double> params;
  std::int64_t trials = 10;
  std::uint64_t seed = 1;
  bool exact = true;
  double C = 8.0;
  double kappa = 4.0;
  std::string output;
  OutputFormat format = OutputFormat::csv;
};

struct TrialRecord {
  std::string family;
  std::int64_t n = 0;
  Coord delta = 0;
  double param = 0.0;
  std::int64_t trial = 0;
  double estimate = 0.0;
  std::optional<double> exact;
  double abs_err = 0.0;
  double rel_err = 0.0;
  std::int64_t queries = 0;
  /// Not written to files; output must not depend on the clock.
  double wall_ms = 0.0;
  bool success = false;
};

struct SweepSummary {
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double success_rate = 0.0;
  double median_abs_err = 0.0;
  /// Log-log slope of the per-parameter median absolute error.
  std::optional<double> slope;
  std::int64_t max_queries = 0;
};

struct SweepResult {
  std::vector<TrialRecord> records;
  SweepSummary summary;
};

/// Error window used by the success flag.
bool within_bound(const std::string& family, double estimate, double exact, std::int64_t n,
                  Coord delta, int dim, double param, double C, double kappa);

SweepResult run_sweep(const ExperimentConfig& cfg);
SweepSummary summarize(const std::vector<TrialRecord>& records);

/// Least-squares slope of log y against log x over positive pairs.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string to_csv(const std::vector<TrialRecord>& records);
nlohmann::ordered_json to_json(const SweepResult& r);
void write_sweep(const SweepResult& r, const std::string& path, OutputFormat fmt);

/// Output location: absolute paths as given, relative ones under
/// $RCQ_OUTPUT_DIR when set.
std::string resolve_output(const std::string& path);

}  // namespace rcq
