#include "spectral/benchmarks.hpp"

#include <algorithm>
#include <sstream>

#include "spectral/error.hpp"
#include "spectral/io_util.hpp"

namespace spectral {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw InputError("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

bool wants(const BenchmarkOptions& options, const std::string& estimator) {
  return options.estimators.empty() ||
         std::find(options.estimators.begin(), options.estimators.end(), estimator) != options.estimators.end();
}

void record(BenchmarkResult& out, const std::string& suite, const std::string& estimator, double sweep,
            std::uint64_t seed, const EstimatorOutcome& r) {
  const StageTimings& t = r.timings;
  out.losses.push_back({suite, estimator, sweep, seed, r.test_loss, r.test_se, "total", t.total()});
  const std::pair<const char*, double> stages[] = {{"kernel_build", t.kernel_build},
                                                   {"eigendecomposition", t.eigendecomposition},
                                                   {"coefficients", t.coefficients},
                                                   {"validation", t.validation}};
  for (const auto& [stage, seconds] : stages) {
    out.timings.push_back({suite, estimator, sweep, seed, r.test_loss, r.test_se, stage, seconds});
  }
}

std::string describe(const LossEntry& e) {
  std::ostringstream s;
  s << e.family << " param=" << e.param;
  if (e.j >= 0) s << " J=" << e.j;
  if (e.penalty > 0.0) s << " gamma=" << e.penalty;
  return s.str();
}

}  // namespace

double BenchmarkResult::median_loss(const std::string& estimator, double sweep_value) const {
  std::vector<double> v;
  for (const auto& r : losses)
    if (r.estimator == estimator && r.sweep_value == sweep_value) v.push_back(r.loss);
  return median(v);
}

double BenchmarkResult::median_seconds(const std::string& estimator, double sweep_value,
                                       const std::string& stage) const {
  std::vector<double> v;
  const auto& rows = stage == "total" ? losses : timings;
  for (const auto& r : rows)
    if (r.estimator == estimator && r.sweep_value == sweep_value && r.stage == stage) v.push_back(r.seconds);
  return median(v);
}

void BenchmarkResult::append(const BenchmarkResult& other) {
  losses.insert(losses.end(), other.losses.begin(), other.losses.end());
  timings.insert(timings.end(), other.timings.begin(), other.timings.end());
}

DatasetSplit standardized_split(const Dataset& data, const SplitSpec& spec) {
  DatasetSplit parts = split(data, spec);
  auto [train, st] = standardize(parts.train);
  parts.train = std::move(train);
  parts.val.features = st.apply(parts.val.features);
  parts.test.features = st.apply(parts.test.features);
  return parts;
}

EstimatorOutcome evaluate_series(const DatasetSplit& split, const TuneGrid& grid, const EigenMethod& method) {
  auto [model, report] = tune_series(split.train, split.val, grid, method);
  const Eigen::VectorXd pred = predict(model, split.test.features);
  score_test(report, pred, *split.test.responses);
  return {*report.test_loss, *report.test_se, report.timings, describe(report.chosen_entry())};
}

EstimatorOutcome evaluate_baseline(const DatasetSplit& split, const std::vector<BaselineCandidate>& candidates) {
  auto [model, report] = tune_baseline(split.train, split.val, candidates);
  const Eigen::VectorXd pred = model.predict(split.test.features);
  score_test(report, pred, *split.test.responses);
  return {*report.test_loss, *report.test_se, report.timings, describe(report.chosen_entry())};
}

BenchmarkResult run_circle_dims(const CircleDimsOptions& circle, const BenchmarkOptions& options) {
  BenchmarkResult out;
  const std::string suite = "circle-dims";
  for (Index d : circle.dims) {
    for (std::uint64_t seed : options.seeds) {
      const Dataset data = gen_circle({circle.n, d, circle.noise_var, false, seed});
      const DatasetSplit parts = standardized_split(data, {0.5, 0.25, 0.25, seed});
      const auto bandwidths = bandwidth_grid(parts.train.features, options.grid_size);
      const Index j_max = std::min(options.j_max, parts.train.rows() - 1);
      const auto sweep = static_cast<double>(d);
      if (wants(options, "Series-radial"))
        record(out, suite, "Series-radial", sweep, seed, evaluate_series(parts, TuneGrid::gaussian(bandwidths, j_max)));
      if (wants(options, "KRR-radial"))
        record(out, suite, "KRR-radial", sweep, seed, evaluate_baseline(parts, krr_candidates(bandwidths)));
      if (wants(options, "NW"))
        record(out, suite, "NW", sweep, seed, evaluate_baseline(parts, nw_candidates(bandwidths)));
      if (wants(options, "kNN"))
        record(out, suite, "kNN", sweep, seed, evaluate_baseline(parts, knn_candidates(parts.train.rows())));
    }
  }
  return out;
}

BenchmarkResult run_growing_n(const GrowingNOptions& growing, const BenchmarkOptions& options) {
  BenchmarkResult out;
  const std::string suite = "growing-n";
  for (Index n_train : growing.train_sizes) {
    const Index total = n_train + 2 * growing.holdout;
    const double val_frac = static_cast<double>(growing.holdout) / static_cast<double>(total);
    const SplitSpec fractions{1.0 - 2.0 * val_frac, val_frac, val_frac, 0};
    for (std::uint64_t seed : options.seeds) {
      const Dataset data = gen_circle({total, growing.d, growing.noise_var, false, seed});
      SplitSpec spec = fractions;
      spec.seed = seed;
      const DatasetSplit parts = standardized_split(data, spec);
      const auto bandwidths = bandwidth_grid(parts.train.features, options.grid_size);
      const TuneGrid grid = TuneGrid::gaussian(bandwidths, std::min(options.j_max, parts.train.rows() - 1));
      const auto sweep = static_cast<double>(parts.train.rows());
      if (wants(options, "Series-full"))
        record(out, suite, "Series-full", sweep, seed, evaluate_series(parts, grid, EigenMethod::full()));
      if (wants(options, "Series-randomized"))
        record(out, suite, "Series-randomized", sweep, seed,
               evaluate_series(parts, grid, EigenMethod::randomized(seed, growing.oversample, growing.power_iters)));
    }
  }
  return out;
}

BenchmarkResult run_spiral_compare(const SpiralCompareOptions& spiral, const BenchmarkOptions& options) {
  BenchmarkResult out;
  const std::string suite = "spiral-compare";
  for (Index n : spiral.sizes) {
    for (std::uint64_t seed : options.seeds) {
      SpiralOptions gen;
      gen.n = n;
      gen.noise_sd = spiral.noise_sd;
      gen.seed = seed;
      const DatasetSplit parts = standardized_split(gen_spiral(gen), {0.5, 0.25, 0.25, seed});
      const auto bandwidths = bandwidth_grid(parts.train.features, options.grid_size);
      const Index j_max = std::min(options.j_max, parts.train.rows() - 1);
      const auto sweep = static_cast<double>(n);
      if (wants(options, "Series-radial"))
        record(out, suite, "Series-radial", sweep, seed, evaluate_series(parts, TuneGrid::gaussian(bandwidths, j_max)));
      for (int q : spiral.poly_degrees) {
        const std::string name = "Series-poly" + std::to_string(q);
        if (wants(options, name))
          record(out, suite, name, sweep, seed,
                 evaluate_series(parts, TuneGrid::polynomial({q}, j_max, Normalization::Uniform)));
      }
      if (wants(options, "KRR-radial"))
        record(out, suite, "KRR-radial", sweep, seed, evaluate_baseline(parts, krr_candidates(bandwidths)));
      if (wants(options, "NW"))
        record(out, suite, "NW", sweep, seed, evaluate_baseline(parts, nw_candidates(bandwidths)));
      if (wants(options, "kNN"))
        record(out, suite, "kNN", sweep, seed, evaluate_baseline(parts, knn_candidates(parts.train.rows())));
    }
  }
  return out;
}

void write_benchmark_csv(const std::filesystem::path& path, const std::vector<BenchmarkRow>& rows) {
  std::ostringstream s;
  s << "suite,estimator,sweep_value,seed,loss,se,stage,seconds\n";
  for (const auto& r : rows) {
    s << r.suite << ',' << r.estimator << ',' << format_double(r.sweep_value) << ',' << r.seed << ','
      << format_double(r.loss) << ',' << format_double(r.se) << ',' << r.stage << ',' << format_double(r.seconds)
      << '\n';
  }
  write_file_atomic(path, s.str());
}

}  // namespace spectral
