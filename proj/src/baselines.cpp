#include "spectral/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "spectral/error.hpp"

namespace spectral {

Eigen::VectorXd nw_predict(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y, double eps,
                           const Eigen::MatrixXd& xnew) {
  if (x_train.rows() < 1) throw InputError("nw_predict: no training rows");
  if (y.size() != x_train.rows()) throw InputError("nw_predict: response length mismatch");
  if (!(eps > 0.0)) throw InputError("nw_predict: bandwidth must be positive");
  if (xnew.cols() != x_train.cols()) throw InputError("nw_predict: dimension mismatch");

  Eigen::MatrixXd d2 = squared_distances(xnew, x_train);
  Eigen::VectorXd out(xnew.rows());
  for (Eigen::Index i = 0; i < xnew.rows(); ++i) {
    const double shift = d2.row(i).minCoeff();
    const Eigen::ArrayXd w = (-(d2.row(i).array() - shift) / (4.0 * eps)).exp().transpose();
    out(i) = (w * y.array()).sum() / w.sum();
  }
  return out;
}

Eigen::VectorXd knn_predict(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& y, Eigen::Index k,
                            const Eigen::MatrixXd& xnew) {
  const Eigen::Index n = x_train.rows();
  if (y.size() != n) throw InputError("knn_predict: response length mismatch");
  if (k < 1 || k > n) throw InputError("knn_predict: k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  if (xnew.cols() != x_train.cols()) throw InputError("knn_predict: dimension mismatch");

  const Eigen::MatrixXd d2 = squared_distances(xnew, x_train);
  Eigen::VectorXd out(xnew.rows());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < xnew.rows(); ++i) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    auto closer = [&](Eigen::Index a, Eigen::Index b) {
      return d2(i, a) < d2(i, b) || (d2(i, a) == d2(i, b) && a < b);
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), closer);
    double sum = 0.0;
    for (Eigen::Index r = 0; r < k; ++r) sum += y(order[static_cast<std::size_t>(r)]);
    out(i) = sum / static_cast<double>(k);
  }
  return out;
}

KRRModel krr_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const KernelSpec& spec, double gamma) {
  if (!(gamma > 0.0)) throw InputError("krr_fit: penalty must be positive");
  if (y.size() != x.rows()) throw InputError("krr_fit: response length mismatch");
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd system = gram_matrix(spec, x);
  system.diagonal().array() += static_cast<double>(n) * gamma;

  KRRModel model{spec, x, Eigen::VectorXd(), gamma};
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-12) {
    model.dual_coefficients = llt.solve(y);
  } else {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    if (!(lu.rcond() > 1e-12)) {
      throw NumericalError("krr_fit: system is ill-conditioned (rcond " + std::to_string(lu.rcond()) + ")");
    }
    model.dual_coefficients = lu.solve(y);
  }
  return model;
}

Eigen::VectorXd krr_predict(const KRRModel& model, const Eigen::MatrixXd& xnew) {
  if (xnew.cols() != model.training_points.cols()) throw InputError("krr_predict: dimension mismatch");
  return gram_matrix(model.kernel, xnew, model.training_points) * model.dual_coefficients;
}

}  // namespace spectral
