#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spectral/model_selection.hpp"

namespace spectral {

/// One long-format benchmark record. Loss rows carry stage "total" with the
/// summed wall-clock; timing rows repeat loss/se and give one stage each.
struct BenchmarkRow {
  std::string suite;
  std::string estimator;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  double loss = 0.0;
  double se = 0.0;
  std::string stage;
  double seconds = 0.0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> losses;
  std::vector<BenchmarkRow> timings;

  /// Median test loss of an estimator at one sweep value.
  double median_loss(const std::string& estimator, double sweep_value) const;
  /// Median seconds of a stage (or "total") at one sweep value.
  double median_seconds(const std::string& estimator, double sweep_value, const std::string& stage) const;

  void append(const BenchmarkResult& other);
};

/// Outcome of tuning one estimator on a train/val/test split.
struct EstimatorOutcome {
  double test_loss = 0.0;
  double test_se = 0.0;
  StageTimings timings;
  std::string chosen;  // human-readable chosen parameters
};

/// Standardizes covariates with training statistics and applies the same
/// transform to validation and test rows.
DatasetSplit standardized_split(const Dataset& data, const SplitSpec& spec);

EstimatorOutcome evaluate_series(const DatasetSplit& split, const TuneGrid& grid, const EigenMethod& method = {});
EstimatorOutcome evaluate_baseline(const DatasetSplit& split, const std::vector<BaselineCandidate>& candidates);

struct BenchmarkOptions {
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  int grid_size = 10;
  Index j_max = 60;
  std::vector<std::string> estimators;  // empty: the suite's default set
};

struct CircleDimsOptions {
  std::vector<Index> dims = {10, 50, 100, 500, 1000, 2500};
  Index n = 500;
  double noise_var = 0.5;
};

/// Circle in R^d at increasing d. Estimators: Series-radial, KRR-radial, NW, kNN.
BenchmarkResult run_circle_dims(const CircleDimsOptions& circle, const BenchmarkOptions& options);

struct GrowingNOptions {
  std::vector<Index> train_sizes = {250, 500, 1000, 2000};
  Index holdout = 250;  // validation and test rows each
  Index d = 10;
  double noise_var = 0.5;
  int oversample = 10;
  int power_iters = 2;
};

/// Increasing training size with full and randomized eigendecomposition.
/// Estimators: Series-full, Series-randomized.
BenchmarkResult run_growing_n(const GrowingNOptions& growing, const BenchmarkOptions& options);

struct SpiralCompareOptions {
  std::vector<Index> sizes = {400};
  double noise_sd = 0.1;
  std::vector<int> poly_degrees = {1, 2, 3, 4, 5, 6};
};

/// Noisy spiral, predicting the arc parameter. Estimators: Series-radial,
/// Series-poly<q> per degree, KRR-radial, NW, kNN.
BenchmarkResult run_spiral_compare(const SpiralCompareOptions& spiral, const BenchmarkOptions& options);

void write_benchmark_csv(const std::filesystem::path& path, const std::vector<BenchmarkRow>& rows);

}  // namespace spectral
