#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spectral {

using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// Observations in rows. Responses are optional so the same type carries
/// unlabeled covariates and query sets.
struct Dataset {
  Eigen::MatrixXd features;
  std::optional<Eigen::VectorXd> responses;
  std::vector<std::string> column_names;

  Index rows() const { return features.rows(); }
  Index dims() const { return features.cols(); }
  bool has_responses() const { return responses.has_value(); }

  /// Throws InputError unless the shape and finiteness invariants hold.
  /// An empty dataset (zero rows) is accepted only when allow_empty is set.
  void validate(bool allow_empty = false) const;

  /// Rows selected in the given order.
  Dataset subset(const IndexList& rows) const;
};

/// Per-column affine transform to mean 0 and unit sample sd (n - 1).
/// Constant columns are mapped to 0 and flagged.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd sds;
  std::vector<bool> constant;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& z) const;
};

struct SplitSpec {
  double train_frac = 0.5;
  double val_frac = 0.25;
  double test_frac = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitIndices {
  IndexList train;
  IndexList val;
  IndexList test;
};

struct DatasetSplit {
  Dataset train;
  Dataset val;
  Dataset test;
};

struct CsvOptions {
  bool has_header = true;
  /// Column name (with a header) or zero-based index.
  std::optional<std::string> response_column;
  /// A named response column that is absent is not an error.
  bool response_optional = false;
  bool allow_empty = false;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes a header line, optionally preceded by "# <comment>" lines. Values
/// use 17 significant digits.
void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::vector<std::string>& comments = {});

std::pair<Dataset, Standardizer> standardize(const Dataset& data);

Dataset unit_normalize_rows(const Dataset& data);
Eigen::MatrixXd unit_normalize_rows(const Eigen::MatrixXd& x);

/// Floor-rounded validation and test sizes, remainder to train. The row
/// permutation depends only on (n, seed).
SplitIndices split_indices(Index n, const SplitSpec& spec);
DatasetSplit split(const Dataset& data, const SplitSpec& spec);

// Synthetic generators.

struct SpiralOptions {
  Index n = 400;
  double noise_sd = 0.1;
  double u_max = 9.0 * 3.14159265358979323846 * 3.14159265358979323846;
  std::uint64_t seed = 0;
};

/// Points (sqrt(u) cos sqrt(u), sqrt(u) sin sqrt(u)) plus Gaussian noise,
/// u ~ Unif(0, u_max); response is the arc parameter sqrt(u).
Dataset gen_spiral(const SpiralOptions& options);

/// Noise-free spiral point at parameter u.
Eigen::Vector2d spiral_point(double u);

struct CircleOptions {
  Index n = 500;
  Index d = 2;
  double noise_var = 0.5;
  bool rotate = false;
  std::uint64_t seed = 0;
};

/// Unit circle in the first two coordinates of R^d (optionally rotated by a
/// seeded random orthogonal matrix); response ~ N(theta, noise_var).
Dataset gen_circle(const CircleOptions& options);

Dataset gen_uniform_interval(Index n, double lo, double hi, std::uint64_t seed);

}  // namespace spectral
