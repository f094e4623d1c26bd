#pragma once

#include <Eigen/Core>

#include "spectral/kernels.hpp"

namespace spectral {

/// Nadaraya-Watson with a Gaussian kernel of bandwidth eps. Weights are
/// computed relative to each query's nearest training point, so in the
/// eps -> 0 limit the prediction is the nearest label instead of 0/0.
Eigen::VectorXd nw_predict(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y, double eps,
                           const Eigen::MatrixXd& xnew);

/// Mean label of the k nearest training rows; equal distances go to the
/// lower index.
Eigen::VectorXd knn_predict(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y, Eigen::Index k,
                            const Eigen::MatrixXd& xnew);

struct KRRModel {
  KernelSpec kernel;
  Eigen::MatrixXd training_points;
  Eigen::VectorXd dual_coefficients;  // alpha
  double penalty = 0.0;               // gamma
};

/// Solves (K + n gamma I) alpha = y.
KRRModel krr_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const KernelSpec& spec, double gamma);

/// sum_j alpha_j k(x, X_j).
Eigen::VectorXd krr_predict(const KRRModel& model, const Eigen::MatrixXd& xnew);

}  // namespace spectral
