#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "spectral/error.hpp"
#include "spectral/kernels.hpp"
#include "spectral/log.hpp"

namespace spectral {

/// How the kernel matrix is turned into the operator whose eigenvectors form
/// the basis.
///   Stochastic     row-stochastic Markov matrix A = D^-1 K (default)
///   Symmetric      D^-1/2 K D^-1/2 used directly, uniform weights
///   BiasCorrected  Stochastic applied to K*(i,j) = K(i,j) / (p(i) p(j))
///   Uniform        K / n, uniform weights; admits kernels with negative entries
enum class Normalization { Stochastic, Symmetric, BiasCorrected, Uniform };

inline std::string to_string(Normalization mode) {
  switch (mode) {
    case Normalization::Stochastic: return "stochastic";
    case Normalization::Symmetric: return "symmetric";
    case Normalization::BiasCorrected: return "bias-corrected";
    case Normalization::Uniform: return "uniform";
  }
  return "?";
}

inline Normalization normalization_from_string(const std::string& s) {
  if (s == "stochastic") return Normalization::Stochastic;
  if (s == "symmetric") return Normalization::Symmetric;
  if (s == "bias-corrected") return Normalization::BiasCorrected;
  if (s == "uniform") return Normalization::Uniform;
  throw InputError("unknown normalization '" + s + "'");
}

struct EigenMethod {
  enum class Kind { Full, Randomized };
  Kind kind = Kind::Full;
  int oversample = 10;
  int power_iters = 2;
  std::uint64_t seed = 0;

  static EigenMethod full() { return {}; }
  static EigenMethod randomized(std::uint64_t seed, int oversample = 10, int power_iters = 2) {
    return {Kind::Randomized, oversample, power_iters, seed};
  }
  bool is_randomized() const { return kind == Kind::Randomized; }
};

/// Wall-clock seconds spent in the two basis stages.
struct BasisTimings {
  double kernel_build = 0.0;
  double eigendecomposition = 0.0;
};

/// Eigenvalues (descending) and density-rescaled eigenvectors of the
/// diffusion operator at the training points, with everything the Nystrom
/// extension needs to evaluate the basis elsewhere.
template <typename Scalar>
struct EigenBasis {
  KernelSpec kernel;
  Normalization mode = Normalization::Stochastic;
  EigenMethod method;
  Matrix<Scalar> training_points;  // n x d
  Vector<Scalar> eigenvalues;      // J_max + 1, descending
  Matrix<Scalar> eigenvectors;     // n x (J_max + 1), column j = psi_j
  Vector<Scalar> stationary;       // s-hat, sums to 1
  /// Mode-specific training row data for out-of-sample weights: row sums of
  /// K (Symmetric) or the degrees p-hat (BiasCorrected); empty otherwise.
  Vector<Scalar> row_scale;
  /// Components with eigenvalue <= floor_ratio * lambda_0 cannot be extended.
  double floor_ratio = 1e-3;

  Eigen::Index size() const { return training_points.rows(); }
  Eigen::Index dims() const { return training_points.cols(); }
  Eigen::Index j_max() const { return eigenvalues.size() - 1; }

  Scalar eigen_floor() const { return Scalar(floor_ratio) * eigenvalues(0); }

  /// Largest J such that lambda_0..lambda_J all clear the floor; -1 if none.
  Eigen::Index usable_j() const {
    const Scalar floor = eigen_floor();
    Eigen::Index j = -1;
    while (j + 1 <= j_max() && eigenvalues(j + 1) > floor && eigenvalues(j + 1) > Scalar(0)) ++j;
    return j;
  }
};

using EigenBasisd = EigenBasis<double>;

// ---------------------------------------------------------------------------
// Normalizations

template <typename Derived>
Vector<typename Derived::Scalar> checked_row_sums(const Eigen::MatrixBase<Derived>& k) {
  Vector<typename Derived::Scalar> sums = k.rowwise().sum();
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    if (!(sums(i) > 0) || !std::isfinite(static_cast<double>(sums(i)))) {
      throw NumericalError("kernel row " + std::to_string(i) + " has nonpositive sum");
    }
  }
  return sums;
}

/// A(i, j) = K(i, j) / sum_l K(i, l).
template <typename Derived>
Matrix<typename Derived::Scalar> row_stochastic(const Eigen::MatrixBase<Derived>& k) {
  const auto sums = checked_row_sums(k);
  return sums.cwiseInverse().asDiagonal() * k;
}

/// K(i, j) / (sqrt(r_i) sqrt(r_j)), similar to the row-stochastic matrix.
template <typename Derived>
Matrix<typename Derived::Scalar> symmetric_normalize(const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> root = checked_row_sums(k).cwiseSqrt();
  const Eigen::Index n = k.rows();
  Matrix<Scalar> out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const Scalar v = k(i, j) / (root(i) * root(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

/// p-hat(X_i) = (1/n) sum_j K(i, j).
template <typename Derived>
Vector<typename Derived::Scalar> degrees(const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  return checked_row_sums(k) / Scalar(k.cols());
}

/// Stationary distribution of the row-stochastic chain: degrees normalized
/// to sum to one.
template <typename Derived>
Vector<typename Derived::Scalar> stationary_weights(const Eigen::MatrixBase<Derived>& k) {
  const auto sums = checked_row_sums(k);
  return sums / sums.sum();
}

/// K*(i, j) = K(i, j) / (p-hat(i) p-hat(j)).
template <typename Derived>
Matrix<typename Derived::Scalar> bias_correct(const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> p = degrees(k);
  const Eigen::Index n = k.rows();
  Matrix<Scalar> out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const Scalar v = k(i, j) / (p(i) * p(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eigendecomposition

template <typename Scalar>
struct EigenPairs {
  Vector<Scalar> values;   // descending
  Matrix<Scalar> vectors;  // columns scaled so (1/n) sum v_j v_k = delta_jk
};

namespace detail {

template <typename Scalar>
Matrix<Scalar> thin_q(const Matrix<Scalar>& y) {
  Eigen::HouseholderQR<Matrix<Scalar>> qr(y);
  return qr.householderQ() * Matrix<Scalar>::Identity(y.rows(), y.cols());
}

template <typename Scalar>
void fix_signs(Matrix<Scalar>& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < Scalar(0)) v.col(c) = -v.col(c);
  }
}

/// Top-k eigenpairs of a symmetric matrix by randomized range finding with
/// subspace (power) iterations.
template <typename Derived>
EigenPairs<typename Derived::Scalar> randomized_eigh(const Eigen::MatrixBase<Derived>& a, Eigen::Index k,
                                                     const EigenMethod& method) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = a.rows();
  const Eigen::Index width = std::min<Eigen::Index>(n, k + std::max(0, method.oversample));
  std::mt19937_64 rng(method.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<Scalar> omega(n, width);
  for (Eigen::Index c = 0; c < width; ++c)
    for (Eigen::Index r = 0; r < n; ++r) omega(r, c) = Scalar(normal(rng));

  Matrix<Scalar> q = thin_q<Scalar>(a * omega);
  // (A A^T)^q A = A^(2q + 1) for symmetric A; re-orthonormalize after each product.
  for (int it = 0; it < 2 * std::max(0, method.power_iters); ++it) q = thin_q<Scalar>(a * q);

  Matrix<Scalar> b = q.transpose() * (a * q);
  b = (b + b.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(b);
  if (es.info() != Eigen::Success) throw NumericalError("randomized eigensolver failed");
  EigenPairs<Scalar> out;
  out.values = es.eigenvalues().tail(k).reverse();
  out.vectors = q * es.eigenvectors().rightCols(k).rowwise().reverse();
  return out;
}

}  // namespace detail

/// Leading (J_max + 1) eigenpairs of a symmetric matrix, eigenvalues
/// descending, vectors scaled to (1/n) sum v_j(i) v_k(i) = delta_jk with the
/// largest-magnitude entry of each vector positive.
template <typename Derived>
EigenPairs<typename Derived::Scalar> eigendecompose(const Eigen::MatrixBase<Derived>& a, Eigen::Index j_max,
                                                    const EigenMethod& method = {}) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw InputError("eigendecompose: matrix is not square");
  if (j_max < 0 || j_max + 1 > n) {
    throw InputError("eigendecompose: J_max + 1 = " + std::to_string(j_max + 1) + " exceeds n = " +
                     std::to_string(n));
  }
  const Scalar scale = a.cwiseAbs().maxCoeff();
  const Scalar asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > Scalar(1e-10) * scale) {
    throw InputError("eigendecompose: input is not symmetric (max asymmetry " +
                     std::to_string(static_cast<double>(asym)) + ")");
  }
  const Eigen::Index k = j_max + 1;

  EigenPairs<Scalar> out;
  if (method.is_randomized()) {
    out = detail::randomized_eigh(a, k, method);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(a.eval());
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
    out.values = es.eigenvalues().tail(k).reverse();
    out.vectors = es.eigenvectors().rightCols(k).rowwise().reverse();
  }

  for (Eigen::Index j = 0; j + 1 < k; ++j) {
    if (out.values(j) - out.values(j + 1) < Scalar(1e-12)) {
      log(LogLevel::Info, "eigenvalues " + std::to_string(j) + " and " + std::to_string(j + 1) +
                              " are numerically tied");
    }
  }
  for (Eigen::Index c = 0; c < k; ++c) out.vectors.col(c).normalize();
  out.vectors *= std::sqrt(Scalar(n));
  detail::fix_signs(out.vectors);
  return out;
}

/// psi(i) = v(i) / sqrt(s(i)): eigenvectors of the symmetric matrix mapped to
/// right eigenvectors of the row-stochastic one.
template <typename DerivedV, typename DerivedS>
Matrix<typename DerivedV::Scalar> rescale(const Eigen::MatrixBase<DerivedV>& vectors,
                                          const Eigen::MatrixBase<DerivedS>& s) {
  if (s.size() != vectors.rows()) throw InputError("rescale: weight length mismatch");
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (!(s(i) > 0)) throw NumericalError("rescale: stationary weight " + std::to_string(i) + " is not positive");
  }
  return s.cwiseSqrt().cwiseInverse().asDiagonal() * vectors;
}

/// The operator whose right eigenvectors are the basis at the training
/// points: row-stochastic A, the symmetric form, A built from K*, or K / n.
template <typename Derived>
Matrix<typename Derived::Scalar> operator_matrix(const Eigen::MatrixBase<Derived>& k, Normalization mode) {
  using Scalar = typename Derived::Scalar;
  switch (mode) {
    case Normalization::Stochastic: return row_stochastic(k);
    case Normalization::Symmetric: return symmetric_normalize(k);
    case Normalization::BiasCorrected: return row_stochastic(bias_correct(k));
    case Normalization::Uniform: return k / Scalar(k.rows());
  }
  throw InputError("unknown normalization");
}

/// Kernel matrix -> normalization -> eigendecomposition -> density rescaling.
template <typename Derived>
EigenBasis<typename Derived::Scalar> fit_basis(const Eigen::MatrixBase<Derived>& x, const KernelSpec& spec,
                                               Eigen::Index j_max, Normalization mode = Normalization::Stochastic,
                                               const EigenMethod& method = {}, BasisTimings* timings = nullptr) {
  using Scalar = typename Derived::Scalar;
  using Clock = std::chrono::steady_clock;
  const Eigen::Index n = x.rows();
  if (n < 2) throw InputError("fit_basis needs at least 2 points");
  if (j_max < 0 || j_max + 1 > n) {
    throw InputError("fit_basis: J_max + 1 = " + std::to_string(j_max + 1) + " exceeds n = " + std::to_string(n));
  }
  spec.validate();

  const auto t0 = Clock::now();
  EigenBasis<Scalar> basis;
  basis.kernel = spec;
  basis.mode = mode;
  basis.method = method;
  basis.training_points = x;

  Matrix<Scalar> k = gram_matrix(spec, x);
  Matrix<Scalar> sym;
  switch (mode) {
    case Normalization::Stochastic:
    case Normalization::BiasCorrected: {
      if (!spec.is_gaussian() && k.minCoeff() < Scalar(0)) {
        throw InputError("polynomial kernel has negative entries; unit-normalize rows or use uniform mode");
      }
      if (mode == Normalization::BiasCorrected) {
        basis.row_scale = degrees(k);
        k = bias_correct(k);
      }
      basis.stationary = stationary_weights(k);
      sym = symmetric_normalize(k);
      break;
    }
    case Normalization::Symmetric:
      if (!spec.is_gaussian() && k.minCoeff() < Scalar(0)) {
        throw InputError("polynomial kernel has negative entries; unit-normalize rows or use uniform mode");
      }
      basis.row_scale = checked_row_sums(k);
      basis.stationary = Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n));
      sym = symmetric_normalize(k);
      break;
    case Normalization::Uniform:
      basis.stationary = Vector<Scalar>::Constant(n, Scalar(1) / Scalar(n));
      sym = k / Scalar(n);
      break;
  }
  const auto t1 = Clock::now();

  EigenPairs<Scalar> pairs = eigendecompose(sym, j_max, method);
  if (mode == Normalization::Stochastic || mode == Normalization::BiasCorrected) {
    // Top pair is known in closed form; a small spectral gap lets the solver blur it.
    const Vector<Scalar> v0 = (Scalar(n) * basis.stationary).cwiseSqrt();
    pairs.values(0) = Scalar(1);
    pairs.vectors.col(0) = v0;
    for (Eigen::Index c = 1; c < pairs.vectors.cols(); ++c) {
      pairs.vectors.col(c) -= (v0.dot(pairs.vectors.col(c)) / Scalar(n)) * v0;
      pairs.vectors.col(c) *= std::sqrt(Scalar(n)) / pairs.vectors.col(c).norm();
    }
  }
  basis.eigenvalues = std::move(pairs.values);
  basis.eigenvectors = rescale(pairs.vectors, basis.stationary);
  const auto t2 = Clock::now();

  if (timings) {
    timings->kernel_build += std::chrono::duration<double>(t1 - t0).count();
    timings->eigendecomposition += std::chrono::duration<double>(t2 - t1).count();
  }
  return basis;
}

/// nu^2_j = (1 - lambda_j) / eps, the spectrum of (I - A) / eps. Clamped at 0
/// against roundoff in lambda_0.
template <typename Scalar>
Vector<Scalar> smoothness_spectrum(const EigenBasis<Scalar>& basis) {
  if (!basis.kernel.is_gaussian()) throw InputError("smoothness spectrum needs a Gaussian kernel");
  const Scalar eps = Scalar(basis.kernel.bandwidth);
  return ((Scalar(1) - basis.eigenvalues.array()) / eps).cwiseMax(Scalar(0)).matrix();
}

}  // namespace spectral
