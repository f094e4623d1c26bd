#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spectral/error.hpp"
#include "spectral/parallel.hpp"

namespace spectral {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class KernelFamily { Gaussian, Polynomial };

/// Gaussian exp(-|x - y|^2 / (4 eps)) or polynomial (<x, y> + 1)^q.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth = 1.0;  // eps, Gaussian only
  int degree = 1;          // q, polynomial only

  static KernelSpec gaussian(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("Gaussian bandwidth must be positive");
    return {KernelFamily::Gaussian, eps, 0};
  }
  static KernelSpec polynomial(int q) {
    if (q < 1) throw InputError("polynomial degree must be at least 1");
    return {KernelFamily::Polynomial, 0.0, q};
  }

  bool is_gaussian() const { return family == KernelFamily::Gaussian; }

  void validate() const {
    if (is_gaussian()) {
      if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw InputError("Gaussian bandwidth must be positive");
    } else if (degree < 1) {
      throw InputError("polynomial degree must be at least 1");
    }
  }

  /// "gaussian" / "poly", the family tag used in reports and archives.
  std::string family_name() const { return is_gaussian() ? "gaussian" : "poly"; }
  /// eps for Gaussian, q for polynomial.
  double parameter() const { return is_gaussian() ? bandwidth : static_cast<double>(degree); }
};

namespace detail {

template <typename Scalar>
Scalar apply_kernel(const KernelSpec& spec, Scalar sqdist_or_dot) {
  using std::exp;
  using std::pow;
  if (spec.is_gaussian()) return exp(-sqdist_or_dot / (Scalar(4) * Scalar(spec.bandwidth)));
  return pow(sqdist_or_dot + Scalar(1), spec.degree);
}

}  // namespace detail

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar kernel_value(const KernelSpec& spec, const Eigen::MatrixBase<DerivedX>& x,
                                       const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) {
    throw InputError("kernel_value: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  using Scalar = typename DerivedX::Scalar;
  const auto xv = x.reshaped();
  const auto yv = y.reshaped();
  const Scalar arg = spec.is_gaussian() ? (xv - yv).squaredNorm() : xv.dot(yv);
  return detail::apply_kernel(spec, arg);
}

/// Squared Euclidean distances between the rows of a and the rows of b.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> squared_distances(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != b.cols()) throw InputError("squared_distances: column count mismatch");
  Matrix<Scalar> d2(a.rows(), b.rows());
  const Matrix<Scalar> bt = b.transpose();
  parallel_for(a.rows(), [&](Eigen::Index i) {
    const Vector<Scalar> ai = a.row(i).transpose();
    for (Eigen::Index j = 0; j < bt.cols(); ++j) d2(i, j) = (ai - bt.col(j)).squaredNorm();
  });
  return d2;
}

/// Kernel matrix with entry (i, j) = k(a_i, b_j). Pass the same matrix twice
/// (or use the one-argument overload) to get an exactly symmetric result.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> gram_matrix(const KernelSpec& spec,
                                              const Eigen::MatrixBase<DerivedA>& a,
                                              const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  spec.validate();
  if (a.cols() != b.cols()) {
    throw InputError("gram_matrix: dimension mismatch (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()) + " columns)");
  }
  Matrix<Scalar> k;
  if (spec.is_gaussian()) {
    k = squared_distances(a, b);
  } else {
    k = a * b.transpose();
  }
  k = k.unaryExpr([&spec](Scalar v) { return detail::apply_kernel(spec, v); });
  return k;
}

template <typename Derived>
Matrix<typename Derived::Scalar> gram_matrix(const KernelSpec& spec, const Eigen::MatrixBase<Derived>& a) {
  Matrix<typename Derived::Scalar> k = gram_matrix(spec, a, a);
  k = (k + k.transpose()) / typename Derived::Scalar(2);
  return k;
}

namespace detail {

template <typename Derived>
std::vector<double> sorted_pair_distances(const Eigen::MatrixBase<Derived>& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw InputError("bandwidth selection needs at least 2 points");
  std::vector<double> d2;
  d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d2.push_back(static_cast<double>((x.row(i) - x.row(j)).squaredNorm()));
  std::sort(d2.begin(), d2.end());
  if (!(d2.back() > 0.0)) throw InputError("bandwidth selection: all points are identical");
  return d2;
}

inline double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace detail

/// Candidate Gaussian bandwidths: quantiles of the pairwise squared distances
/// divided by 4, at quantile levels log-spaced over [0.01, 0.99]. A single
/// candidate sits at the median. Duplicate or zero quantiles are dropped.
template <typename Derived>
std::vector<double> bandwidth_grid(const Eigen::MatrixBase<Derived>& x, int n_grid) {
  if (n_grid < 1) throw InputError("bandwidth_grid needs n_grid >= 1");
  const std::vector<double> d2 = detail::sorted_pair_distances(x);

  std::vector<double> levels;
  if (n_grid == 1) {
    levels.push_back(0.5);
  } else {
    const double a = std::log(0.01), b = std::log(0.99);
    for (int g = 0; g < n_grid; ++g)
      levels.push_back(std::exp(a + (b - a) * g / static_cast<double>(n_grid - 1)));
  }
  std::vector<double> out;
  for (double p : levels) {
    const double eps = detail::quantile_sorted(d2, p) / 4.0;
    if (eps > 0.0 && (out.empty() || eps > out.back())) out.push_back(eps);
  }
  if (out.empty()) throw InputError("bandwidth_grid: no positive distance quantiles");
  return out;
}

/// Single bandwidth at quantile level p of the pairwise squared distances, / 4.
template <typename Derived>
double bandwidth_quantile(const Eigen::MatrixBase<Derived>& x, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("bandwidth quantile level must lie in [0, 1]");
  const double eps = detail::quantile_sorted(detail::sorted_pair_distances(x), p) / 4.0;
  if (!(eps > 0.0)) throw InputError("bandwidth quantile is zero; choose a higher level");
  return eps;
}

}  // namespace spectral
