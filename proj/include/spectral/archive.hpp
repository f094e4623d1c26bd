#pragma once

#include <filesystem>
#include <optional>

#include "spectral/dataset.hpp"
#include "spectral/series.hpp"

namespace spectral {

inline constexpr int kArchiveFormatVersion = 1;

/// Covariate transforms applied before the kernel: standardization first,
/// then unit-norm rows.
struct Preprocessing {
  std::optional<Standardizer> standardizer;
  bool unit_norm = false;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct ModelArchive {
  int format_version = kArchiveFormatVersion;
  SeriesModeld model;
  Preprocessing preprocessing;

  /// Raw covariates in, predictions out.
  Eigen::VectorXd predict(const Eigen::MatrixXd& raw) const;
};

/// Container layout: 8-byte magic "SPSERIES", little-endian u64 header
/// length, JSON header, then blocks of (u64 rows, u64 cols, rows * cols
/// little-endian f64 in row-major order) in the order listed by the header.
void save_model(const std::filesystem::path& path, const ModelArchive& archive);

/// Throws IoError on a bad magic, truncated data or a format_version other
/// than kArchiveFormatVersion.
ModelArchive load_model(const std::filesystem::path& path);

}  // namespace spectral
