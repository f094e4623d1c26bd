#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "spectral/diffusion.hpp"

namespace spectral {

namespace detail {

/// Operator weights between query rows and the training points, i.e. the
/// out-of-sample analogue of the operator matrix rows. Gaussian weights for
/// the normalized modes are computed relative to each query's nearest
/// training point, so they cannot underflow to 0/0. Rows where a
/// non-Gaussian kernel row sum is not positive are reported in `fallback`.
template <typename Scalar, typename Derived>
Matrix<Scalar> operator_weights(const EigenBasis<Scalar>& basis, const Eigen::MatrixBase<Derived>& xnew,
                                std::vector<Eigen::Index>& fallback) {
  const KernelSpec& spec = basis.kernel;
  const Eigen::Index n = basis.size();
  const Eigen::Index m = xnew.rows();
  Matrix<Scalar> w;

  if (basis.mode == Normalization::Uniform) {
    w = gram_matrix(spec, xnew, basis.training_points) / Scalar(n);
    return w;
  }

  Vector<Scalar> shift = Vector<Scalar>::Zero(m);
  if (spec.is_gaussian()) {
    w = squared_distances(xnew, basis.training_points);
    shift = w.rowwise().minCoeff();
    const Scalar denom = Scalar(4) * Scalar(spec.bandwidth);
    for (Eigen::Index i = 0; i < m; ++i) {
      using std::exp;
      w.row(i) = (-(w.row(i).array() - shift(i)) / denom).exp().matrix();
    }
    shift /= denom;  // log of the factor divided out of each row
  } else {
    w = gram_matrix(spec, xnew, basis.training_points);
  }

  if (basis.mode == Normalization::BiasCorrected) {
    w = w * basis.row_scale.cwiseInverse().asDiagonal();
  }

  const Vector<Scalar> sums = w.rowwise().sum();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(sums(i) > Scalar(0)) || !std::isfinite(static_cast<double>(sums(i)))) {
      fallback.push_back(i);
      w.row(i).setZero();
      continue;
    }
    if (basis.mode == Normalization::Symmetric) {
      using std::exp;
      using std::sqrt;
      // k / (sqrt(sum k) sqrt(r_j)) with k = exp(-shift) * k_shifted.
      const Scalar factor = exp(-shift(i) / Scalar(2)) / sqrt(sums(i));
      w.row(i) = (w.row(i).array() * factor / basis.row_scale.transpose().array().sqrt()).matrix();
    } else {
      w.row(i) /= sums(i);
    }
  }
  return w;
}

}  // namespace detail

/// Nystrom extension of psi_0..psi_J to the query rows:
/// psi_j(x) = (1 / lambda_j) sum_l w(x, X_l) psi_j(X_l).
template <typename Scalar, typename Derived>
Matrix<Scalar> extend(const EigenBasis<Scalar>& basis, const Eigen::MatrixBase<Derived>& xnew, Eigen::Index j) {
  if (xnew.cols() != basis.dims()) {
    throw InputError("Nystrom: query has " + std::to_string(xnew.cols()) + " columns, basis expects " +
                     std::to_string(basis.dims()));
  }
  if (j < 0 || j > basis.j_max()) {
    throw InputError("Nystrom: J = " + std::to_string(j) + " outside [0, " + std::to_string(basis.j_max()) + "]");
  }
  const Scalar floor = basis.eigen_floor();
  for (Eigen::Index c = 0; c <= j; ++c) {
    if (!(basis.eigenvalues(c) > floor) || !(basis.eigenvalues(c) > Scalar(0))) {
      throw NumericalError("Nystrom: eigenvalue " + std::to_string(c) + " (" +
                           std::to_string(static_cast<double>(basis.eigenvalues(c))) +
                           ") is below the floor; at most " + std::to_string(basis.usable_j()) +
                           " components are available");
    }
  }
  if (xnew.rows() == 0) return Matrix<Scalar>(0, j + 1);

  std::vector<Eigen::Index> fallback;
  const Matrix<Scalar> w = detail::operator_weights(basis, xnew, fallback);
  Matrix<Scalar> out = w * basis.eigenvectors.leftCols(j + 1);
  out = out * basis.eigenvalues.head(j + 1).cwiseInverse().asDiagonal();

  for (Eigen::Index i : fallback) {
    Eigen::Index nearest = 0;
    (basis.training_points.rowwise() - xnew.row(i)).rowwise().squaredNorm().minCoeff(&nearest);
    out.row(i) = basis.eigenvectors.row(nearest).head(j + 1);
    log_warning("Nystrom: kernel weights vanish for query row " + std::to_string(i) +
                "; using nearest training point " + std::to_string(nearest));
  }
  return out;
}

/// Nontrivial diffusion coordinates (psi_1, ..., psi_J) of the query rows.
template <typename Scalar, typename Derived>
Matrix<Scalar> eigenmap(const EigenBasis<Scalar>& basis, const Eigen::MatrixBase<Derived>& xnew, Eigen::Index j) {
  if (j < 1) throw InputError("eigenmap needs J >= 1");
  return extend(basis, xnew, j).rightCols(j);
}

}  // namespace spectral
