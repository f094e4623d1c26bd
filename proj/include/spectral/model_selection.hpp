#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectral/baselines.hpp"
#include "spectral/dataset.hpp"
#include "spectral/series.hpp"

namespace spectral {

/// Mean squared error (1/n) sum (y_i - yhat_i)^2.
double empirical_loss(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals);

/// s / sqrt(n), with s^2 the sample variance (n - 1) of the squared residuals.
double loss_se(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals);

struct SeriesCandidate {
  KernelSpec kernel;
  Normalization mode = Normalization::Stochastic;
};

struct TuneGrid {
  std::vector<SeriesCandidate> candidates;
  Index j_max = 60;
  /// Eigenvalue floor of every fitted basis, relative to lambda_0.
  double floor_ratio = 1e-3;

  static TuneGrid gaussian(const std::vector<double>& bandwidths, Index j_max,
                           Normalization mode = Normalization::Stochastic);
  static TuneGrid polynomial(const std::vector<int>& degrees, Index j_max,
                             Normalization mode = Normalization::Uniform);
  void append(const TuneGrid& other);
  void validate() const;
};

/// min(n_train - 1, 60).
Index default_j_max(Index n_train);

struct StageTimings {
  double kernel_build = 0.0;
  double eigendecomposition = 0.0;
  double coefficients = 0.0;
  double validation = 0.0;

  double total() const { return kernel_build + eigendecomposition + coefficients + validation; }
};

/// One point of the validation-loss surface. For series models `family` is
/// the kernel family, `param` is eps or q and `j` the truncation; baselines
/// use family "nw" / "knn" / "krr", j = -1, and `penalty` for KRR's gamma.
struct LossEntry {
  std::string family;
  double param = 0.0;
  Index j = -1;
  double penalty = 0.0;
  double loss = 0.0;
};

struct FitReport {
  std::vector<LossEntry> loss_surface;
  std::size_t chosen = 0;  // index into loss_surface
  std::optional<double> test_loss;
  std::optional<double> test_se;
  StageTimings timings;

  const LossEntry& chosen_entry() const { return loss_surface.at(chosen); }
  double validation_loss() const { return chosen_entry().loss; }
};

/// Fits one basis and one coefficient vector per candidate at J_max, extends
/// all columns to the validation rows once, and scores every truncation
/// J <= J_max by cumulative sums. Components below the eigenvalue floor are
/// not scored. Ties go to the smaller J, then the larger bandwidth.
/// Unlabeled rows, when given, join the basis (semi-supervised fit) but not
/// the coefficient estimates.
std::pair<SeriesModeld, FitReport> tune_series(const Dataset& train, const Dataset& val, const TuneGrid& grid,
                                               const EigenMethod& method = {},
                                               const Eigen::MatrixXd* unlabeled = nullptr);

/// Test loss and its standard error, stored into the report.
void score_test(FitReport& report, const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals);

enum class BaselineKind { NadarayaWatson, KNearest, KernelRidge };

std::string to_string(BaselineKind kind);

/// param is eps (NW), k (kNN) or gamma (KRR, with `kernel` giving the kernel).
struct BaselineCandidate {
  BaselineKind kind = BaselineKind::NadarayaWatson;
  double param = 1.0;
  KernelSpec kernel;
};

struct BaselineModel {
  BaselineCandidate params;
  Eigen::MatrixXd x_train;
  Eigen::VectorXd y_train;
  std::optional<KRRModel> krr;

  Eigen::VectorXd predict(const Eigen::MatrixXd& xnew) const;
};

BaselineModel fit_baseline(const Dataset& train, const BaselineCandidate& candidate);

/// Argmin validation loss over the candidates; equal losses go to the
/// smoother model (larger eps, k or gamma).
std::pair<BaselineModel, FitReport> tune_baseline(const Dataset& train, const Dataset& val,
                                                  const std::vector<BaselineCandidate>& candidates);

// Default candidate lists.

/// 10 log-spaced penalties over [1e-8, 1e2].
std::vector<double> krr_penalty_grid();
std::vector<BaselineCandidate> nw_candidates(const std::vector<double>& bandwidths);
/// Roughly geometric k in [1, n_train].
std::vector<BaselineCandidate> knn_candidates(Index n_train);
std::vector<BaselineCandidate> krr_candidates(const std::vector<double>& bandwidths,
                                              const std::vector<double>& penalties = krr_penalty_grid());

}  // namespace spectral
