#pragma once

#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "spectral/nystrom.hpp"

namespace spectral {

/// f(x) = sum_{j <= J} beta_j psi_j(x). Coefficients are stored up to J_max;
/// the active truncation J is a view over them.
template <typename Scalar>
struct SeriesModel {
  std::shared_ptr<const EigenBasis<Scalar>> basis;
  Vector<Scalar> coefficients;  // J_max + 1
  Eigen::Index truncation = 0;  // J
  bool ssl = false;

  Eigen::Index j_max() const { return coefficients.size() - 1; }

  /// Same basis and coefficients, different truncation.
  SeriesModel with_truncation(Eigen::Index j) const {
    if (j < 0 || j > j_max()) throw InputError("truncation outside [0, J_max]");
    SeriesModel out = *this;
    out.truncation = j;
    return out;
  }
};

using SeriesModeld = SeriesModel<double>;

/// beta_j = (1/n) sum_{i in L} y_i psi_j(X_i) w_i, with n the basis size and
/// w = s-hat renormalized over the labeled rows L. With every row labeled this is exactly the
/// s-hat weighted inner product.
template <typename Scalar, typename DerivedY>
Vector<Scalar> estimate_coefficients(const EigenBasis<Scalar>& basis, const std::vector<Eigen::Index>& labeled,
                                     const Eigen::MatrixBase<DerivedY>& y) {
  if (labeled.empty()) throw InputError("estimate_coefficients: empty labeled set");
  if (static_cast<Eigen::Index>(labeled.size()) != y.size()) {
    throw InputError("estimate_coefficients: " + std::to_string(y.size()) + " responses for " +
                     std::to_string(labeled.size()) + " labeled rows");
  }
  const Eigen::Index n = basis.size();
  Scalar mass(0);
  for (Eigen::Index i : labeled) {
    if (i < 0 || i >= n) throw InputError("estimate_coefficients: labeled index out of range");
    mass += basis.stationary(i);
  }
  if (!(mass > Scalar(0))) throw NumericalError("estimate_coefficients: labeled rows carry no weight");

  Vector<Scalar> beta = Vector<Scalar>::Zero(basis.eigenvectors.cols());
  for (std::size_t k = 0; k < labeled.size(); ++k) {
    const Eigen::Index i = labeled[k];
    beta += (y(static_cast<Eigen::Index>(k)) * basis.stationary(i)) * basis.eigenvectors.row(i).transpose();
  }
  return beta / (mass * Scalar(n));
}

template <typename Scalar, typename DerivedY>
Vector<Scalar> estimate_coefficients(const EigenBasis<Scalar>& basis, const Eigen::MatrixBase<DerivedY>& y) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(basis.size()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  return estimate_coefficients(basis, all, y);
}

/// Design matrix Z = [psi_0 ... psi_J] at the training points and W = diag(s-hat).
template <typename Scalar>
Matrix<Scalar> design_matrix(const EigenBasis<Scalar>& basis) {
  return basis.eigenvectors;
}

/// Weighted least squares through the normal equations (Z^T W Z) b = Z^T W y,
/// solved directly rather than through the orthogonality shortcut.
template <typename Scalar, typename DerivedY>
Vector<Scalar> wls_coefficients(const EigenBasis<Scalar>& basis, const Eigen::MatrixBase<DerivedY>& y) {
  if (y.size() != basis.size()) throw InputError("wls_coefficients: needs a response for every training row");
  const Matrix<Scalar> z = design_matrix(basis);
  const auto w = basis.stationary.asDiagonal();
  const Matrix<Scalar> gram = z.transpose() * w * z;
  const Vector<Scalar> rhs = z.transpose() * (w * y.derived());
  Eigen::LLT<Matrix<Scalar>> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("wls_coefficients: Z^T W Z is singular, basis orthogonality is violated");
  }
  return llt.solve(rhs);
}

template <typename Scalar, typename Derived>
Vector<Scalar> predict(const SeriesModel<Scalar>& model, const Eigen::MatrixBase<Derived>& xnew) {
  const Eigen::Index j = model.truncation;
  const Matrix<Scalar> psi = extend(*model.basis, xnew, j);
  return psi * model.coefficients.head(j + 1);
}

template <typename Scalar>
SeriesModel<Scalar> fit_series(const Matrix<Scalar>& x, const Vector<Scalar>& y, const KernelSpec& spec,
                               Eigen::Index j_max, Normalization mode = Normalization::Stochastic,
                               const EigenMethod& method = {}) {
  if (y.size() != x.rows()) throw InputError("fit_series: response length mismatch");
  SeriesModel<Scalar> model;
  model.basis = std::make_shared<const EigenBasis<Scalar>>(fit_basis(x, spec, j_max, mode, method));
  model.coefficients = estimate_coefficients(*model.basis, y);
  model.truncation = std::max<Eigen::Index>(0, std::min(j_max, model.basis->usable_j()));
  return model;
}

/// Basis from labeled and unlabeled rows together; coefficients from the
/// labeled rows only.
template <typename Scalar>
SeriesModel<Scalar> fit_ssl(const Matrix<Scalar>& x_labeled, const Vector<Scalar>& y,
                            const Matrix<Scalar>& x_unlabeled, const KernelSpec& spec, Eigen::Index j_max,
                            Normalization mode = Normalization::Stochastic, const EigenMethod& method = {}) {
  if (x_labeled.rows() == 0) throw InputError("fit_ssl: empty labeled set");
  if (y.size() != x_labeled.rows()) throw InputError("fit_ssl: response length mismatch");
  if (x_unlabeled.rows() > 0 && x_unlabeled.cols() != x_labeled.cols()) {
    throw InputError("fit_ssl: unlabeled rows have a different dimension");
  }
  Matrix<Scalar> pooled(x_labeled.rows() + x_unlabeled.rows(), x_labeled.cols());
  pooled.topRows(x_labeled.rows()) = x_labeled;
  if (x_unlabeled.rows() > 0) pooled.bottomRows(x_unlabeled.rows()) = x_unlabeled;

  std::vector<Eigen::Index> labeled(static_cast<std::size_t>(x_labeled.rows()));
  std::iota(labeled.begin(), labeled.end(), Eigen::Index{0});

  SeriesModel<Scalar> model;
  model.basis = std::make_shared<const EigenBasis<Scalar>>(fit_basis(pooled, spec, j_max, mode, method));
  model.coefficients = estimate_coefficients(*model.basis, labeled, y);
  model.truncation = std::max<Eigen::Index>(0, std::min(j_max, model.basis->usable_j()));
  model.ssl = x_unlabeled.rows() > 0;
  return model;
}

/// sum_{j <= J} nu^2_j beta_j^2, the spectral roughness of the fitted function.
template <typename Scalar>
Scalar smoothness_functional(const SeriesModel<Scalar>& model) {
  const Vector<Scalar> nu2 = smoothness_spectrum(*model.basis);
  const Eigen::Index j = model.truncation;
  return (nu2.head(j + 1).array() * model.coefficients.head(j + 1).array().square()).sum();
}

}  // namespace spectral
