#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "spectral/diffusion.hpp"
#include "spectral/error.hpp"
#include "support.hpp"

using namespace spectral;

namespace {

// Two points at distance 2 with eps = 1: off-diagonal kernel e^-1.
Eigen::MatrixXd two_point_gram() {
  const double e = std::exp(-1.0);
  Eigen::MatrixXd k(2, 2);
  k << 1, e, e, 1;
  return k;
}

Eigen::MatrixXd random_gram(Index n, std::uint64_t seed, double eps = 0.5) {
  return gram_matrix(KernelSpec::gaussian(eps), test::random_normal(n, 2, seed));
}

double orthonormality_error(const EigenBasisd& b) {
  const double n = static_cast<double>(b.size());
  const Eigen::MatrixXd g = b.eigenvectors.transpose() * b.stationary.asDiagonal() * b.eigenvectors / n;
  return test::max_abs(g - Eigen::MatrixXd::Identity(g.rows(), g.cols()));
}

double residual(const EigenBasisd& b) {
  const Eigen::MatrixXd a = operator_matrix(gram_matrix(b.kernel, b.training_points), b.mode);
  return test::max_abs(a * b.eigenvectors - b.eigenvectors * b.eigenvalues.asDiagonal());
}

}  // namespace

TEST_CASE("row_stochastic 2-point closed form") {
  const Eigen::MatrixXd a = row_stochastic(two_point_gram());
  const double p = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(a(0, 0) == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(a(0, 1) == doctest::Approx(0.2689).epsilon(1e-4));
  CHECK(a(0, 0) == doctest::Approx(p).epsilon(1e-15));
  CHECK(a(1, 0) == doctest::Approx(1.0 - p).epsilon(1e-14));
}

TEST_CASE("row_stochastic rows sum to one and isolated points give the identity") {
  const Eigen::MatrixXd a = row_stochastic(random_gram(30, 1));
  CHECK(test::max_abs(a.rowwise().sum() - Eigen::VectorXd::Ones(30)) < 1e-12);
  CHECK(a.minCoeff() >= 0.0);

  Eigen::MatrixXd x(3, 1);
  x << 0, 100, 200;
  CHECK(test::max_abs(row_stochastic(gram_matrix(KernelSpec::gaussian(0.1), x)) - Eigen::MatrixXd::Identity(3, 3)) ==
        0.0);

  Eigen::MatrixXd bad = two_point_gram();
  bad.row(1).setZero();
  CHECK_THROWS_AS(row_stochastic(bad), NumericalError);
}

TEST_CASE("symmetric_normalize: exact symmetry, equal-degree case, spectrum of A") {
  const Eigen::MatrixXd k2 = two_point_gram();
  CHECK(test::max_abs(symmetric_normalize(k2) - row_stochastic(k2)) < 1e-15);

  const Eigen::MatrixXd k = random_gram(20, 2);
  const Eigen::MatrixXd s = symmetric_normalize(k);
  CHECK(s == s.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(s, Eigen::EigenvaluesOnly);
  Eigen::EigenSolver<Eigen::MatrixXd> gen(row_stochastic(k), false);
  std::vector<double> a, b;
  for (Index i = 0; i < 20; ++i) {
    a.push_back(sym.eigenvalues()(i));
    b.push_back(gen.eigenvalues()(i).real());
    CHECK(std::abs(gen.eigenvalues()(i).imag()) < 1e-10);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
}

TEST_CASE("stationary_weights") {
  const Eigen::VectorXd s2 = stationary_weights(two_point_gram());
  CHECK(s2(0) == doctest::Approx(0.5));
  CHECK(s2(1) == doctest::Approx(0.5));

  const Eigen::VectorXd same = stationary_weights(Eigen::MatrixXd::Ones(4, 4).eval());
  CHECK(test::max_abs(same - Eigen::VectorXd::Constant(4, 0.25)) < 1e-15);

  const Eigen::MatrixXd k = random_gram(30, 3);
  const Eigen::VectorXd s = stationary_weights(k);
  CHECK(std::abs(s.sum() - 1.0) < 1e-12);
  CHECK(s.minCoeff() >= 0.0);
  CHECK(test::max_abs(s.transpose() * row_stochastic(k) - s.transpose()) < 1e-10);
}

TEST_CASE("bias_correct") {
  const double e = std::exp(-1.0);
  const Eigen::MatrixXd kb = bias_correct(two_point_gram());
  CHECK(kb(0, 1) == doctest::Approx(e / std::pow((1 + e) / 2, 2)).epsilon(1e-14));
  CHECK(kb(0, 1) == doctest::Approx(0.7864).epsilon(1e-4));

  // Constant degrees c: K* = K / c^2.
  Eigen::MatrixXd k(3, 3);
  k << 1, 0.5, 0.5, 0.5, 1, 0.5, 0.5, 0.5, 1;
  const double c = 2.0 / 3.0;
  CHECK(test::max_abs(bias_correct(k) - k / (c * c)) < 1e-14);

  const Eigen::MatrixXd kr = bias_correct(random_gram(25, 4));
  CHECK(kr == kr.transpose());
}

TEST_CASE("eigendecompose 2-point eigenvalues") {
  const double e = std::exp(-1.0);
  const EigenPairs<double> p = eigendecompose(symmetric_normalize(two_point_gram()), 1);
  CHECK(p.values(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.values(1) == doctest::Approx((1 - e) / (1 + e)).epsilon(1e-14));
  CHECK(p.values(1) == doctest::Approx(0.46212).epsilon(1e-5));
}

TEST_CASE("eigendecompose: ordering, scaling, sign convention and errors") {
  const Eigen::MatrixXd s = symmetric_normalize(random_gram(40, 5));
  const EigenPairs<double> p = eigendecompose(s, 9);
  CHECK(p.values.size() == 10);
  for (Index j = 0; j + 1 < 10; ++j) CHECK(p.values(j) >= p.values(j + 1));
  const Eigen::MatrixXd g = p.vectors.transpose() * p.vectors / 40.0;
  CHECK(test::max_abs(g - Eigen::MatrixXd::Identity(10, 10)) < 1e-12);
  for (Index c = 0; c < 10; ++c) {
    Index arg = 0;
    p.vectors.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(p.vectors(arg, c) > 0.0);
  }
  CHECK(test::max_abs(s * p.vectors - p.vectors * p.values.asDiagonal()) < 1e-8);

  Eigen::MatrixXd asym = s;
  asym(0, 1) += 1e-6;
  CHECK_THROWS_AS(eigendecompose(asym, 3), InputError);
  CHECK_THROWS_AS(eigendecompose(s, 40), InputError);
}

TEST_CASE("randomized eigendecomposition recovers an exact low-rank matrix") {
  const Index n = 60;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(test::random_normal(n, 5, 6));
  const Eigen::MatrixXd u = qr.householderQ() * Eigen::MatrixXd::Identity(n, 5);
  Eigen::VectorXd lam(5);
  lam << 5, 3, 2, 1, 0.5;
  const Eigen::MatrixXd a = u * lam.asDiagonal() * u.transpose();
  const Eigen::MatrixXd sym = (a + a.transpose()) / 2;
  const EigenPairs<double> full = eigendecompose(sym, 5);
  const EigenPairs<double> rnd = eigendecompose(sym, 5, EigenMethod::randomized(3));
  CHECK(test::max_abs(full.values - rnd.values) < 1e-6);
  CHECK(test::max_abs(full.values.head(5) - lam) < 1e-10);
}

TEST_CASE("randomized output is deterministic given the seed") {
  const Eigen::MatrixXd s = symmetric_normalize(random_gram(120, 7));
  const auto a = eigendecompose(s, 10, EigenMethod::randomized(42));
  const auto b = eigendecompose(s, 10, EigenMethod::randomized(42));
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("randomized matches full on a Gaussian system with fast spectral decay") {
  const Eigen::MatrixXd x = test::random_normal(300, 2, 8);
  const double eps = bandwidth_grid(x, 1).front();
  const Eigen::MatrixXd s = symmetric_normalize(gram_matrix(KernelSpec::gaussian(eps), x));
  const auto full = eigendecompose(s, 20);
  const auto rnd = eigendecompose(s, 20, EigenMethod::randomized(1, 10, 2));
  const Eigen::ArrayXd rel = (full.values - rnd.values).array().abs() / full.values.array().abs();
  CHECK(rel.maxCoeff() < 1e-3);
}

TEST_CASE("rescale") {
  const Eigen::MatrixXd v = test::random_normal(8, 3, 9);
  CHECK(test::max_abs(rescale(v, Eigen::VectorXd::Constant(8, 1.0 / 8)) - std::sqrt(8.0) * v) < 1e-14);
  Eigen::VectorXd bad = Eigen::VectorXd::Constant(8, 0.125);
  bad(2) = 0.0;
  CHECK_THROWS_AS(rescale(v, bad), NumericalError);
}

TEST_CASE("fit_basis passes the basis invariants in every mode") {
  const Dataset d = test::spiral(50, 0.05, 1);
  const double eps = bandwidth_quantile(d.features, 0.5);
  for (Normalization mode :
       {Normalization::Stochastic, Normalization::Symmetric, Normalization::BiasCorrected, Normalization::Uniform}) {
    CAPTURE(to_string(mode));
    const EigenBasisd b = fit_basis(d.features, KernelSpec::gaussian(eps), 10, mode);
    CHECK(std::abs(b.stationary.sum() - 1.0) < 1e-12);
    CHECK(orthonormality_error(b) < 1e-8);
    CHECK(residual(b) < 1e-8);
    if (mode == Normalization::Stochastic || mode == Normalization::BiasCorrected) {
      CHECK(std::abs(b.eigenvalues(0) - 1.0) < 1e-8);
      CHECK(b.eigenvectors.col(0).maxCoeff() - b.eigenvectors.col(0).minCoeff() < 1e-6);
    }
  }
}

TEST_CASE("stochastic eigenvalues lie in [-1, 1]") {
  const Eigen::MatrixXd x = test::random_normal(80, 3, 10);
  const EigenBasisd b = fit_basis(x, KernelSpec::gaussian(0.3), 79);
  CHECK(b.eigenvalues.maxCoeff() <= 1.0 + 1e-10);
  CHECK(b.eigenvalues.minCoeff() >= -1.0 - 1e-10);
}

TEST_CASE("uniform mode on a polynomial kernel gives unweighted orthogonal columns") {
  const Eigen::MatrixXd x = test::random_normal(40, 3, 11);
  const EigenBasisd b = fit_basis(x, KernelSpec::polynomial(2), 6, Normalization::Uniform);
  // s-hat = 1/n, so psi^T psi / n^2 = I.
  const Eigen::MatrixXd g = b.eigenvectors.transpose() * b.eigenvectors / (40.0 * 40.0);
  CHECK(test::max_abs(g - Eigen::MatrixXd::Identity(7, 7)) < 1e-8);
  CHECK_THROWS_AS(fit_basis(x, KernelSpec::polynomial(1), 6, Normalization::Stochastic), InputError);
}

TEST_CASE("fit_basis rejects impossible truncations") {
  const Eigen::MatrixXd x = test::random_normal(10, 2, 12);
  CHECK_THROWS_AS(fit_basis(x, KernelSpec::gaussian(1.0), 10), InputError);
  CHECK_THROWS_AS(fit_basis(x.topRows(1), KernelSpec::gaussian(1.0), 0), InputError);
}

TEST_CASE("smoothness_spectrum") {
  EigenBasisd b;
  b.kernel = KernelSpec::gaussian(0.05);
  b.eigenvalues = Eigen::Vector3d(1.0, 0.9, 0.5);
  const Eigen::VectorXd nu2 = smoothness_spectrum(b);
  CHECK(nu2(0) == 0.0);
  CHECK(nu2(1) == doctest::Approx(2.0).epsilon(1e-12));

  const EigenBasisd fitted = fit_basis(test::random_normal(60, 2, 13), KernelSpec::gaussian(0.4), 15);
  const Eigen::VectorXd s = smoothness_spectrum(fitted);
  CHECK(s.minCoeff() >= 0.0);
  for (Index j = 0; j + 1 < s.size(); ++j) CHECK(s(j + 1) >= s(j));

  b.kernel = KernelSpec::polynomial(2);
  CHECK_THROWS_AS(smoothness_spectrum(b), InputError);
}

TEST_CASE("normalization names round-trip") {
  for (Normalization mode :
       {Normalization::Stochastic, Normalization::Symmetric, Normalization::BiasCorrected, Normalization::Uniform})
    CHECK(normalization_from_string(to_string(mode)) == mode);
}
