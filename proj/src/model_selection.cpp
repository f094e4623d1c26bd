#include "spectral/model_selection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "spectral/error.hpp"
#include "spectral/log.hpp"

namespace spectral {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_labeled(const Dataset& data, const char* what) {
  if (!data.has_responses()) throw InputError(std::string(what) + " set has no responses");
  if (data.rows() == 0) throw InputError(std::string(what) + " set is empty");
}

}  // namespace

double empirical_loss(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals) {
  if (predictions.size() != actuals.size()) throw InputError("empirical_loss: length mismatch");
  if (predictions.size() == 0) throw InputError("empirical_loss: empty input");
  return (actuals - predictions).squaredNorm() / static_cast<double>(actuals.size());
}

double loss_se(const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals) {
  if (predictions.size() != actuals.size()) throw InputError("loss_se: length mismatch");
  const Eigen::Index n = actuals.size();
  if (n < 2) throw InputError("loss_se: needs at least 2 residuals");
  const Eigen::ArrayXd sq = (actuals - predictions).array().square();
  const double var = (sq - sq.mean()).square().sum() / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

TuneGrid TuneGrid::gaussian(const std::vector<double>& bandwidths, Index j_max, Normalization mode) {
  TuneGrid grid;
  grid.j_max = j_max;
  for (double eps : bandwidths) grid.candidates.push_back({KernelSpec::gaussian(eps), mode});
  return grid;
}

TuneGrid TuneGrid::polynomial(const std::vector<int>& degrees, Index j_max, Normalization mode) {
  TuneGrid grid;
  grid.j_max = j_max;
  for (int q : degrees) grid.candidates.push_back({KernelSpec::polynomial(q), mode});
  return grid;
}

void TuneGrid::append(const TuneGrid& other) {
  candidates.insert(candidates.end(), other.candidates.begin(), other.candidates.end());
  j_max = std::max(j_max, other.j_max);
}

void TuneGrid::validate() const {
  if (candidates.empty()) throw InputError("tuning grid is empty");
  if (j_max < 0) throw InputError("tuning grid J_max must be nonnegative");
  if (!(floor_ratio >= 0.0 && floor_ratio < 1.0)) throw InputError("eigenvalue floor ratio must lie in [0, 1)");
  for (const auto& c : candidates) c.kernel.validate();
}

Index default_j_max(Index n_train) { return std::max<Index>(0, std::min<Index>(n_train - 1, 60)); }

std::pair<SeriesModeld, FitReport> tune_series(const Dataset& train, const Dataset& val, const TuneGrid& grid,
                                               const EigenMethod& method, const Eigen::MatrixXd* unlabeled) {
  grid.validate();
  require_labeled(train, "training");
  require_labeled(val, "validation");
  if (train.dims() != val.dims()) throw InputError("training and validation dimensions differ");
  if (train.rows() < 2) throw InputError("tune_series needs at least 2 training rows");

  const bool ssl = unlabeled != nullptr && unlabeled->rows() > 0;
  if (ssl && unlabeled->cols() != train.dims()) throw InputError("unlabeled rows have a different dimension");
  Eigen::MatrixXd pooled;
  if (ssl) {
    pooled.resize(train.rows() + unlabeled->rows(), train.dims());
    pooled << train.features, *unlabeled;
  }
  const Eigen::MatrixXd& basis_points = ssl ? pooled : train.features;
  IndexList labeled(static_cast<std::size_t>(train.rows()));
  std::iota(labeled.begin(), labeled.end(), Index{0});

  const Index j_max = std::min(grid.j_max, basis_points.rows() - 1);
  const Eigen::VectorXd& y = *train.responses;
  const Eigen::VectorXd& y_val = *val.responses;
  const double n_val = static_cast<double>(val.rows());

  FitReport report;
  SeriesModeld best;
  auto better = [](const LossEntry& a, const LossEntry& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    if (a.j != b.j) return a.j < b.j;
    return a.param > b.param;
  };

  for (const auto& candidate : grid.candidates) {
    BasisTimings bt;
    EigenBasisd fitted = fit_basis(basis_points, candidate.kernel, j_max, candidate.mode, method, &bt);
    fitted.floor_ratio = grid.floor_ratio;
    auto basis = std::make_shared<const EigenBasisd>(std::move(fitted));
    report.timings.kernel_build += bt.kernel_build;
    report.timings.eigendecomposition += bt.eigendecomposition;

    auto t0 = Clock::now();
    Eigen::VectorXd beta = estimate_coefficients(*basis, labeled, y);
    report.timings.coefficients += seconds_since(t0);

    const Index usable = std::min(j_max, basis->usable_j());
    if (usable < 0) {
      log_warning("candidate " + candidate.kernel.family_name() + " " +
                  std::to_string(candidate.kernel.parameter()) + " has no usable components");
      continue;
    }

    t0 = Clock::now();
    const Eigen::MatrixXd psi = extend(*basis, val.features, usable);
    Eigen::VectorXd pred = Eigen::VectorXd::Zero(val.rows());
    for (Index j = 0; j <= usable; ++j) {
      pred += beta(j) * psi.col(j);
      LossEntry entry{candidate.kernel.family_name(), candidate.kernel.parameter(), j, 0.0,
                      (y_val - pred).squaredNorm() / n_val};
      report.loss_surface.push_back(entry);
      if (report.loss_surface.size() == 1 || better(entry, report.chosen_entry())) {
        report.chosen = report.loss_surface.size() - 1;
        best.basis = basis;
        best.coefficients = beta;
        best.truncation = j;
        best.ssl = ssl;
      }
    }
    report.timings.validation += seconds_since(t0);
  }
  if (report.loss_surface.empty()) throw NumericalError("no tuning candidate produced a usable basis");
  return {std::move(best), std::move(report)};
}

void score_test(FitReport& report, const Eigen::VectorXd& predictions, const Eigen::VectorXd& actuals) {
  report.test_loss = empirical_loss(predictions, actuals);
  report.test_se = predictions.size() >= 2 ? loss_se(predictions, actuals) : 0.0;
}

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::NadarayaWatson: return "nw";
    case BaselineKind::KNearest: return "knn";
    case BaselineKind::KernelRidge: return "krr";
  }
  return "?";
}

Eigen::VectorXd BaselineModel::predict(const Eigen::MatrixXd& xnew) const {
  switch (params.kind) {
    case BaselineKind::NadarayaWatson: return nw_predict(x_train, y_train, params.param, xnew);
    case BaselineKind::KNearest:
      return knn_predict(x_train, y_train, static_cast<Index>(std::llround(params.param)), xnew);
    case BaselineKind::KernelRidge: return krr_predict(*krr, xnew);
  }
  throw InputError("unknown baseline kind");
}

BaselineModel fit_baseline(const Dataset& train, const BaselineCandidate& candidate) {
  require_labeled(train, "training");
  BaselineModel model{candidate, train.features, *train.responses, std::nullopt};
  if (candidate.kind == BaselineKind::KernelRidge) {
    model.krr = krr_fit(train.features, *train.responses, candidate.kernel, candidate.param);
  }
  return model;
}

std::pair<BaselineModel, FitReport> tune_baseline(const Dataset& train, const Dataset& val,
                                                  const std::vector<BaselineCandidate>& candidates) {
  if (candidates.empty()) throw InputError("tune_baseline: no candidates");
  require_labeled(train, "training");
  require_labeled(val, "validation");
  if (train.dims() != val.dims()) throw InputError("training and validation dimensions differ");

  FitReport report;
  std::optional<BaselineModel> best;
  double best_bw = 0.0;
  auto smoother_tie = [&](const LossEntry& e, double bw) {
    const LossEntry& cur = report.chosen_entry();
    if (e.param != cur.param) return e.param > cur.param;
    return bw > best_bw;
  };

  for (const auto& candidate : candidates) {
    auto t0 = Clock::now();
    BaselineModel model;
    try {
      model = fit_baseline(train, candidate);
    } catch (const NumericalError& err) {
      log_warning(std::string("skipping baseline candidate: ") + err.what());
      continue;
    }
    report.timings.coefficients += seconds_since(t0);
    t0 = Clock::now();
    const double loss = empirical_loss(model.predict(val.features), *val.responses);
    report.timings.validation += seconds_since(t0);

    const double bw = candidate.kind == BaselineKind::KernelRidge ? candidate.kernel.parameter() : 0.0;
    LossEntry entry{to_string(candidate.kind), candidate.param, -1, 0.0, loss};
    if (candidate.kind == BaselineKind::KernelRidge) {
      entry.param = bw;
      entry.penalty = candidate.param;
    }
    report.loss_surface.push_back(entry);
    const LossEntry& added = report.loss_surface.back();
    bool take = !best;
    if (!take) {
      const LossEntry& cur = report.chosen_entry();
      if (added.loss != cur.loss) {
        take = added.loss < cur.loss;
      } else if (candidate.kind == BaselineKind::KernelRidge) {
        take = added.penalty != cur.penalty ? added.penalty > cur.penalty : added.param > cur.param;
      } else {
        take = smoother_tie(added, bw);
      }
    }
    if (take) {
      report.chosen = report.loss_surface.size() - 1;
      best = std::move(model);
      best_bw = bw;
    }
  }
  if (!best) throw NumericalError("tune_baseline: every candidate failed");
  return {std::move(*best), std::move(report)};
}

std::vector<double> krr_penalty_grid() {
  std::vector<double> out;
  const double a = std::log(1e-8), b = std::log(1e2);
  for (int i = 0; i < 10; ++i) out.push_back(std::exp(a + (b - a) * i / 9.0));
  return out;
}

std::vector<BaselineCandidate> nw_candidates(const std::vector<double>& bandwidths) {
  std::vector<BaselineCandidate> out;
  for (double eps : bandwidths) out.push_back({BaselineKind::NadarayaWatson, eps, KernelSpec::gaussian(eps)});
  return out;
}

std::vector<BaselineCandidate> knn_candidates(Index n_train) {
  std::vector<BaselineCandidate> out;
  Index last = 0;
  for (int i = 0; i < 16; ++i) {
    const double v = std::pow(static_cast<double>(n_train), i / 15.0);
    const Index k = std::clamp<Index>(static_cast<Index>(std::llround(v)), 1, n_train);
    if (k > last) {
      out.push_back({BaselineKind::KNearest, static_cast<double>(k), KernelSpec{}});
      last = k;
    }
  }
  return out;
}

std::vector<BaselineCandidate> krr_candidates(const std::vector<double>& bandwidths,
                                              const std::vector<double>& penalties) {
  std::vector<BaselineCandidate> out;
  for (double eps : bandwidths)
    for (double gamma : penalties) out.push_back({BaselineKind::KernelRidge, gamma, KernelSpec::gaussian(eps)});
  return out;
}

}  // namespace spectral
