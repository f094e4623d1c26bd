#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spectral/archive.hpp"
#include "spectral/benchmarks.hpp"
#include "spectral/error.hpp"
#include "spectral/io_util.hpp"
#include "spectral/log.hpp"
#include "spectral/model_selection.hpp"

namespace fs = std::filesystem;
using namespace spectral;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  const std::uint64_t drawn = (std::uint64_t{std::random_device{}()} << 32) | std::random_device{}();
  std::cerr << "seed=" << drawn << '\n';
  return drawn;
}

SplitSpec parse_split(const std::string& text, std::uint64_t seed) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw InputError("--split: '" + field + "' is not a number");
    }
  }
  if (parts.size() != 3) throw InputError("--split expects three comma-separated fractions");
  SplitSpec spec{parts[0], parts[1], parts[2], seed};
  spec.validate();
  return spec;
}

Normalization parse_mode(const std::string& s) {
  try {
    return normalization_from_string(s);
  } catch (const std::exception&) {
    throw InputError("unknown normalization '" + s + "'");
  }
}

void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }

std::string vector_csv(const std::string& header, const Eigen::VectorXd& v) {
  std::ostringstream out;
  out << header << '\n';
  for (Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string kind;
  Index n = 0;
  double noise_sd = 0.1;
  double u_max = SpiralOptions{}.u_max;
  Index d = 2;
  double noise_var = 0.5;
  bool rotate = false;
  double lo = 0.0, hi = 1.0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_gen(const GenArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  Dataset data;
  if (a.kind == "spiral") {
    data = gen_spiral({a.n > 0 ? a.n : 400, a.noise_sd, a.u_max, seed});
  } else if (a.kind == "circle") {
    data = gen_circle({a.n > 0 ? a.n : 500, a.d, a.noise_var, a.rotate, seed});
  } else {
    data = gen_uniform_interval(a.n > 0 ? a.n : 100, a.lo, a.hi, seed);
  }
  write_csv(a.out, data, {"seed=" + std::to_string(seed)});
  return 0;
}

// ---------------------------------------------------------------------------
// tune

struct TuneArgs {
  std::string data;
  std::string response = "y";
  std::string kernel = "gaussian";
  std::vector<int> degrees = {1, 2, 3, 4, 5, 6};
  std::vector<double> bandwidths;
  int grid_size = 10;
  std::optional<Index> j_max;
  std::string method = "full";
  int oversample = 10;
  int power_iters = 2;
  std::optional<std::uint64_t> seed;
  std::string split = "0.5,0.25,0.25";
  std::string unlabeled;
  bool standardize = false;
  bool unit_norm = false;
  std::optional<std::string> normalization;
  double eig_floor = 1e-3;
  std::string out = ".";
};

std::string summary_text(const TuneArgs& a, const SeriesModeld& model, const FitReport& report, std::uint64_t seed,
                         Index n_train, Index n_val, Index n_test, Index n_unlabeled) {
  const LossEntry& e = report.chosen_entry();
  const StageTimings& t = report.timings;
  std::ostringstream s;
  s << "data: " << a.data << '\n';
  s << "seed: " << seed << '\n';
  s << "rows: train " << n_train << ", validation " << n_val << ", test " << n_test;
  if (n_unlabeled > 0) s << ", unlabeled " << n_unlabeled;
  s << '\n';
  s << "kernel: " << e.family << (e.family == "gaussian" ? " eps = " : " q = ") << format_double(e.param) << '\n';
  s << "normalization: " << to_string(model.basis->mode) << '\n';
  s << "method: " << a.method << '\n';
  s << "J: " << e.j << " (J_max " << model.j_max() << ")\n";
  s << "validation loss: " << format_double(e.loss) << '\n';
  if (report.test_loss) {
    s << "test loss: " << format_double(*report.test_loss) << " +/- " << format_double(*report.test_se) << '\n';
  }
  s << "timings (s): kernel_build " << t.kernel_build << ", eigendecomposition " << t.eigendecomposition
    << ", coefficients " << t.coefficients << ", validation " << t.validation << '\n';
  return s.str();
}

nlohmann::json report_json(const FitReport& report) {
  nlohmann::json j;
  const LossEntry& e = report.chosen_entry();
  j["chosen"] = {{"family", e.family}, {"param", e.param}, {"J", e.j}, {"loss", e.loss}};
  if (report.test_loss) j["test_loss"] = *report.test_loss;
  if (report.test_se) j["test_se"] = *report.test_se;
  const StageTimings& t = report.timings;
  j["timings"] = {{"kernel_build", t.kernel_build},
                  {"eigendecomposition", t.eigendecomposition},
                  {"coefficients", t.coefficients},
                  {"validation", t.validation}};
  return j;
}

int run_tune(const TuneArgs& a) {
  const std::uint64_t seed = resolve_seed(a.seed);
  const Dataset data = load_csv(a.data, {true, a.response, false, false});
  const SplitSpec spec = parse_split(a.split, seed);
  DatasetSplit parts = split(data, spec);

  Preprocessing prep;
  prep.unit_norm = a.unit_norm;
  if (a.standardize) prep.standardizer = standardize(parts.train).second;
  parts.train.features = prep.apply(parts.train.features);
  parts.val.features = prep.apply(parts.val.features);
  parts.test.features = prep.apply(parts.test.features);

  std::optional<Eigen::MatrixXd> unlabeled;
  if (!a.unlabeled.empty()) {
    CsvOptions opts;
    opts.response_column = a.response;
    opts.response_optional = true;
    const Dataset u = load_csv(a.unlabeled, opts);
    if (u.dims() != data.dims()) {
      throw InputError("unlabeled data has " + std::to_string(u.dims()) + " features, expected " +
                       std::to_string(data.dims()));
    }
    unlabeled = prep.apply(u.features);
  }

  const Index basis_rows = parts.train.rows() + (unlabeled ? unlabeled->rows() : 0);
  const Index j_max = a.j_max ? *a.j_max : default_j_max(basis_rows);
  if (j_max + 1 > basis_rows) {
    throw InputError("--jmax " + std::to_string(j_max) + " needs at least " + std::to_string(j_max + 1) +
                     " training rows, have " + std::to_string(basis_rows));
  }

  TuneGrid grid;
  if (a.kernel == "gaussian") {
    const auto eps = a.bandwidths.empty() ? bandwidth_grid(parts.train.features, a.grid_size) : a.bandwidths;
    grid = TuneGrid::gaussian(eps, j_max, parse_mode(a.normalization.value_or("stochastic")));
  } else {
    grid = TuneGrid::polynomial(a.degrees, j_max, parse_mode(a.normalization.value_or("uniform")));
  }
  grid.floor_ratio = a.eig_floor;
  const EigenMethod method = a.method == "randomized" ? EigenMethod::randomized(seed, a.oversample, a.power_iters)
                                                      : EigenMethod::full();

  auto [model, report] = tune_series(parts.train, parts.val, grid, method, unlabeled ? &*unlabeled : nullptr);
  if (parts.test.rows() > 0) score_test(report, predict(model, parts.test.features), *parts.test.responses);

  ModelArchive archive;
  archive.model = model;
  archive.preprocessing = prep;

  const fs::path out(a.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());

  save_model(out / "model.ssm", archive);

  std::ostringstream surface;
  surface << "kernel,param,J,loss\n";
  for (const auto& e : report.loss_surface) {
    surface << e.family << ',' << format_double(e.param) << ',' << e.j << ',' << format_double(e.loss) << '\n';
  }
  write_text(out / "loss_surface.csv", surface.str());
  write_text(out / "summary.txt", summary_text(a, model, report, seed, parts.train.rows(), parts.val.rows(),
                                               parts.test.rows(), unlabeled ? unlabeled->rows() : 0));
  write_text(out / "report.json", report_json(report).dump(2) + "\n");
  write_text(out / "fit_predictions.csv", vector_csv("prediction", archive.predict(data.features)));

  std::cout << summary_text(a, model, report, seed, parts.train.rows(), parts.val.rows(), parts.test.rows(),
                            unlabeled ? unlabeled->rows() : 0);
  return 0;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string model;
  std::string query;
  std::string response = "y";
  std::string out;
};

Dataset load_query(const std::string& path, const std::string& response) {
  CsvOptions opts;
  opts.response_column = response;
  opts.response_optional = true;
  opts.allow_empty = true;
  return load_csv(path, opts);
}

int run_predict(const PredictArgs& a) {
  const ModelArchive archive = load_model(a.model);
  const Dataset query = load_query(a.query, a.response);
  const Eigen::VectorXd pred = query.rows() == 0 ? Eigen::VectorXd() : archive.predict(query.features);
  write_text(a.out, vector_csv("prediction", pred));
  return 0;
}

// ---------------------------------------------------------------------------
// embed

struct EmbedArgs {
  std::string model;
  std::string data;
  std::string query;
  std::string response = "y";
  Index j = 2;
  std::optional<double> bandwidth;
  double quantile = 0.05;
  std::string normalization = "stochastic";
  bool standardize = false;
  bool unit_norm = false;
  double eig_floor = 1e-3;
  std::string out;
};

int run_embed(const EmbedArgs& a) {
  if (a.j < 1) throw InputError("--J must be at least 1");
  if (a.model.empty() == a.data.empty()) throw InputError("embed needs exactly one of --model or --data");

  std::shared_ptr<const EigenBasisd> basis;
  Preprocessing prep;
  Dataset query;
  if (!a.model.empty()) {
    ModelArchive archive = load_model(a.model);
    basis = archive.model.basis;
    prep = archive.preprocessing;
    if (a.query.empty()) throw InputError("embed --model needs --query");
    query = load_query(a.query, a.response);
  } else {
    query = load_query(a.data, a.response);
    if (query.rows() < 2) throw InputError("embed --data needs at least 2 rows");
    prep.unit_norm = a.unit_norm;
    if (a.standardize) prep.standardizer = standardize(query).second;
    const Eigen::MatrixXd x = prep.apply(query.features);
    const Index limit = x.rows() - 1;
    if (a.j > limit) {
      throw NumericalError("J = " + std::to_string(a.j) + " exceeds the available components (limit " +
                           std::to_string(limit) + ")");
    }
    const double eps = a.bandwidth ? *a.bandwidth : bandwidth_quantile(x, a.quantile);
    EigenBasisd fitted = fit_basis(x, KernelSpec::gaussian(eps), a.j, parse_mode(a.normalization));
    fitted.floor_ratio = a.eig_floor;
    basis = std::make_shared<const EigenBasisd>(std::move(fitted));
    if (!a.query.empty()) query = load_query(a.query, a.response);
  }
  if (a.j > basis->j_max()) {
    throw NumericalError("J = " + std::to_string(a.j) + " exceeds the available components (limit " +
                         std::to_string(std::min(basis->j_max(), basis->usable_j())) + ")");
  }

  std::ostringstream s;
  for (Index c = 1; c <= a.j; ++c) s << (c > 1 ? "," : "") << "psi" << c;
  if (query.has_responses()) s << ",y";
  s << '\n';
  if (query.rows() > 0) {
    if (query.dims() != basis->dims()) {
      throw InputError("query has " + std::to_string(query.dims()) + " features, the basis expects " +
                       std::to_string(basis->dims()));
    }
    const Eigen::MatrixXd coords = eigenmap(*basis, prep.apply(query.features), a.j);
    for (Index i = 0; i < coords.rows(); ++i) {
      for (Index c = 0; c < coords.cols(); ++c) s << (c ? "," : "") << format_double(coords(i, c));
      if (query.has_responses()) s << ',' << format_double((*query.responses)(i));
      s << '\n';
    }
  }
  write_text(a.out, s.str());
  return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchArgs {
  std::string suite;
  std::vector<Index> dims;
  std::vector<Index> sizes;
  std::optional<Index> n;
  int seeds = 10;
  std::uint64_t first_seed = 0;
  int grid_size = 10;
  Index j_max = 60;
  std::vector<std::string> estimators;
  std::vector<int> degrees = {1, 2, 3, 4, 5, 6};
  std::optional<double> noise;
  int oversample = 10;
  int power_iters = 2;
  std::string out = "benchmark";
};

int run_benchmark(const BenchArgs& a) {
  if (a.seeds < 1) throw InputError("--seeds must be at least 1");
  BenchmarkOptions options;
  options.seeds.clear();
  for (int i = 0; i < a.seeds; ++i) options.seeds.push_back(a.first_seed + static_cast<std::uint64_t>(i));
  options.grid_size = a.grid_size;
  options.j_max = a.j_max;
  options.estimators = a.estimators;

  BenchmarkResult result;
  if (a.suite == "circle-dims") {
    CircleDimsOptions o;
    if (!a.dims.empty()) o.dims = a.dims;
    if (a.n) o.n = *a.n;
    if (a.noise) o.noise_var = *a.noise;
    result = run_circle_dims(o, options);
  } else if (a.suite == "growing-n") {
    GrowingNOptions o;
    if (!a.sizes.empty()) o.train_sizes = a.sizes;
    if (!a.dims.empty()) o.d = a.dims.front();
    if (a.noise) o.noise_var = *a.noise;
    o.oversample = a.oversample;
    o.power_iters = a.power_iters;
    result = run_growing_n(o, options);
  } else {
    SpiralCompareOptions o;
    if (!a.sizes.empty()) o.sizes = a.sizes;
    if (a.n) o.sizes = {*a.n};
    if (a.noise) o.noise_sd = *a.noise;
    o.poly_degrees = a.degrees;
    result = run_spiral_compare(o, options);
  }
  write_benchmark_csv(a.out + "_loss.csv", result.losses);
  write_benchmark_csv(a.out + "_time.csv", result.timings);
  std::cout << "wrote " << a.out << "_loss.csv (" << result.losses.size() << " rows) and " << a.out
            << "_time.csv (" << result.timings.size() << " rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string check;
  std::string data;
  std::string coords;
  double tol = 1e-9;
  double min_rho = 0.95;
};

Eigen::VectorXd ranks(const Eigen::VectorXd& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return v(a) < v(b); });
  Eigen::VectorXd r(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v(order[j + 1]) == v(order[i])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r(order[k]) = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ra = ranks(a).array() - ranks(a).mean();
  const Eigen::VectorXd rb = ranks(b).array() - ranks(b).mean();
  return ra.dot(rb) / std::sqrt(ra.squaredNorm() * rb.squaredNorm());
}

int run_verify(const VerifyArgs& a) {
  if (a.check == "spiral") {
    const Dataset data = load_csv(a.data, {true, std::string("y"), false, false});
    if (data.dims() != 2) throw InputError("spiral data must have 2 features");
    double worst = 0.0;
    for (Index i = 0; i < data.rows(); ++i) {
      const double t = (*data.responses)(i);
      worst = std::max(worst, (data.features.row(i).transpose() - spiral_point(t * t)).cwiseAbs().maxCoeff());
    }
    std::cout << "spiral identity max deviation " << format_double(worst) << " (tolerance " << a.tol << ")\n";
    if (worst > a.tol) throw NumericalError("rows deviate from the noiseless spiral");
    return 0;
  }
  const Dataset coords = load_csv(a.coords, {true, std::string("y"), true, false});
  Eigen::VectorXd target;
  if (!a.data.empty()) {
    target = *load_csv(a.data, {true, std::string("y"), false, false}).responses;
  } else if (coords.has_responses()) {
    target = *coords.responses;
  } else {
    throw InputError("verify embedding needs a response column in --coords or --data");
  }
  if (target.size() != coords.rows()) throw InputError("coordinate and data row counts differ");
  const double rho = spearman(coords.features.col(0), target);
  std::cout << "spearman(psi1, y) = " << format_double(rho) << " (minimum |rho| " << a.min_rho << ")\n";
  if (std::abs(rho) < a.min_rho) throw NumericalError("embedding is not monotone in the response");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral series regression"};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Log informational messages");
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("kind", gen.kind, "spiral, circle or uniform")
      ->required()
      ->check(CLI::IsMember({"spiral", "circle", "uniform"}));
  gen_cmd->add_option("--n", gen.n, "Number of rows");
  gen_cmd->add_option("--noise-sd", gen.noise_sd, "Spiral noise standard deviation");
  gen_cmd->add_option("--u-max", gen.u_max, "Spiral parameter range (0, u_max)");
  gen_cmd->add_option("--d", gen.d, "Circle ambient dimension");
  gen_cmd->add_option("--noise-var", gen.noise_var, "Circle response noise variance");
  gen_cmd->add_flag("--rotate", gen.rotate, "Rotate the circle by a random orthogonal matrix");
  gen_cmd->add_option("--lo", gen.lo, "Uniform lower bound");
  gen_cmd->add_option("--hi", gen.hi, "Uniform upper bound");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Fit and tune a spectral series model");
  tune_cmd->add_option("data", tune.data, "Labeled CSV")->required();
  tune_cmd->add_option("--response", tune.response, "Response column name or index");
  tune_cmd->add_option("--kernel", tune.kernel)->check(CLI::IsMember({"gaussian", "poly"}));
  tune_cmd->add_option("--degree", tune.degrees, "Polynomial degrees")->delimiter(',');
  tune_cmd->add_option("--bandwidth", tune.bandwidths, "Gaussian bandwidths")->delimiter(',');
  tune_cmd->add_option("--grid-size", tune.grid_size, "Number of bandwidths when none are given");
  tune_cmd->add_option("--jmax", tune.j_max, "Largest truncation J");
  tune_cmd->add_option("--method", tune.method)->check(CLI::IsMember({"full", "randomized"}));
  tune_cmd->add_option("--oversample", tune.oversample);
  tune_cmd->add_option("--power-iters", tune.power_iters);
  tune_cmd->add_option("--seed", tune.seed, "Split and randomized-eigensolver seed");
  tune_cmd->add_option("--split", tune.split, "train,val,test fractions");
  tune_cmd->add_option("--unlabeled", tune.unlabeled, "Unlabeled covariates for a semi-supervised basis");
  tune_cmd->add_flag("--standardize", tune.standardize);
  tune_cmd->add_flag("--unit-norm", tune.unit_norm);
  tune_cmd->add_option("--normalization", tune.normalization, "stochastic, symmetric, bias-corrected or uniform");
  tune_cmd->add_option("--eig-floor", tune.eig_floor, "Eigenvalue floor relative to lambda_0");
  tune_cmd->add_option("--out", tune.out, "Output directory");

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "Predict with a saved model");
  pred_cmd->add_option("--model", pred.model)->required();
  pred_cmd->add_option("--query", pred.query)->required();
  pred_cmd->add_option("--response", pred.response, "Column ignored in the query if present");
  pred_cmd->add_option("--out", pred.out)->required();

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Export eigenmap coordinates");
  embed_cmd->add_option("--model", embed.model, "Saved model whose basis is used");
  embed_cmd->add_option("--data", embed.data, "CSV to build a basis from");
  embed_cmd->add_option("--query", embed.query, "Rows to embed (default: --data)");
  embed_cmd->add_option("--response", embed.response);
  embed_cmd->add_option("--J", embed.j, "Number of coordinates");
  embed_cmd->add_option("--bandwidth", embed.bandwidth, "Gaussian bandwidth");
  embed_cmd->add_option("--quantile", embed.quantile,
                        "Without --bandwidth: eps is this quantile of the squared pairwise distances, / 4");
  embed_cmd->add_option("--normalization", embed.normalization);
  embed_cmd->add_flag("--standardize", embed.standardize);
  embed_cmd->add_flag("--unit-norm", embed.unit_norm);
  embed_cmd->add_option("--eig-floor", embed.eig_floor);
  embed_cmd->add_option("--out", embed.out)->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run a benchmark suite");
  bench_cmd->add_option("suite", bench.suite)
      ->required()
      ->check(CLI::IsMember({"circle-dims", "growing-n", "spiral-compare"}));
  bench_cmd->add_option("--dims", bench.dims, "Ambient dimensions")->delimiter(',');
  bench_cmd->add_option("--sizes", bench.sizes, "Sample sizes")->delimiter(',');
  bench_cmd->add_option("--n", bench.n, "Sample size");
  bench_cmd->add_option("--seeds", bench.seeds, "Number of replicate seeds");
  bench_cmd->add_option("--seed", bench.first_seed, "First seed");
  bench_cmd->add_option("--grid-size", bench.grid_size);
  bench_cmd->add_option("--jmax", bench.j_max);
  bench_cmd->add_option("--estimators", bench.estimators)->delimiter(',');
  bench_cmd->add_option("--degree", bench.degrees)->delimiter(',');
  bench_cmd->add_option("--noise", bench.noise, "Noise variance (circle) or sd (spiral)");
  bench_cmd->add_option("--oversample", bench.oversample);
  bench_cmd->add_option("--power-iters", bench.power_iters);
  bench_cmd->add_option("--out", bench.out, "Output prefix");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check generator and embedding identities");
  verify_cmd->add_option("check", verify.check)->required()->check(CLI::IsMember({"spiral", "embedding"}));
  verify_cmd->add_option("--data", verify.data);
  verify_cmd->add_option("--coords", verify.coords);
  verify_cmd->add_option("--tol", verify.tol);
  verify_cmd->add_option("--min-rho", verify.min_rho);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (quiet) set_log_level(LogLevel::Quiet);
  if (verbose) set_log_level(LogLevel::Info);

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*tune_cmd) return run_tune(tune);
    if (*pred_cmd) return run_predict(pred);
    if (*embed_cmd) return run_embed(embed);
    if (*bench_cmd) return run_benchmark(bench);
    if (*verify_cmd) {
      if (verify.check == "spiral" && verify.data.empty()) throw InputError("verify spiral needs --data");
      if (verify.check == "embedding" && verify.coords.empty()) throw InputError("verify embedding needs --coords");
      return run_verify(verify);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
