#include <doctest.h>

#include <cmath>
#include <numeric>

#include "spectral/baselines.hpp"
#include "spectral/error.hpp"
#include "support.hpp"

using namespace spectral;

TEST_CASE("Nadaraya-Watson limits") {
  Eigen::MatrixXd one(1, 2);
  one << 0.3, -0.2;
  const Eigen::MatrixXd q = test::random_normal(5, 2, 1);
  const Eigen::VectorXd single = nw_predict(one, Eigen::VectorXd::Constant(1, 4.0), 0.5, q);
  CHECK(test::max_abs(single.array() - 4.0) < 1e-15);

  const Eigen::MatrixXd x = test::random_normal(20, 2, 2);
  const Eigen::VectorXd y = test::random_vector(20, 3);
  CHECK(test::max_abs(nw_predict(x, y, 1e12, q).array() - y.mean()) < 1e-6);

  const Eigen::VectorXd at_points = nw_predict(x, y, 1e-12, x);
  CHECK(test::max_abs(at_points - y) < 1e-12);
}

TEST_CASE("Nadaraya-Watson predictions are convex combinations") {
  const Eigen::MatrixXd x = test::random_normal(40, 3, 4);
  const Eigen::VectorXd y = test::random_vector(40, 5);
  for (double eps : {1e-3, 0.1, 1.0, 100.0}) {
    const Eigen::VectorXd p = nw_predict(x, y, eps, test::random_normal(30, 3, 6) * 10.0);
    CHECK(p.allFinite());
    CHECK(p.minCoeff() >= y.minCoeff() - 1e-12);
    CHECK(p.maxCoeff() <= y.maxCoeff() + 1e-12);
  }
}

TEST_CASE("kNN examples") {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 2;
  const Eigen::Vector3d y(0, 1, 2);
  Eigen::MatrixXd q(1, 1);
  q << 0.9;
  CHECK(knn_predict(x, y, 2, q)(0) == doctest::Approx(0.5));
  CHECK(knn_predict(x, y, 1, x) == y);
  CHECK(knn_predict(x, y, 3, q)(0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(knn_predict(x, y, 0, q), InputError);
  CHECK_THROWS_AS(knn_predict(x, y, 4, q), InputError);
}

TEST_CASE("kNN ties go to the lower index and training order does not matter otherwise") {
  Eigen::MatrixXd x(3, 1);
  x << -1, 1, 5;
  Eigen::MatrixXd q(1, 1);
  q << 0;
  CHECK(knn_predict(x, Eigen::Vector3d(10, 20, 30), 1, q)(0) == 10.0);

  const Eigen::MatrixXd xr = test::random_normal(30, 2, 7);
  const Eigen::VectorXd yr = test::random_vector(30, 8);
  std::vector<Index> perm(30);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::reverse(perm.begin(), perm.end());
  Eigen::MatrixXd xp(30, 2);
  Eigen::VectorXd yp(30);
  for (Index i = 0; i < 30; ++i) {
    xp.row(i) = xr.row(perm[static_cast<std::size_t>(i)]);
    yp(i) = yr(perm[static_cast<std::size_t>(i)]);
  }
  const Eigen::MatrixXd queries = test::random_normal(10, 2, 9);
  CHECK(test::max_abs(knn_predict(xr, yr, 4, queries) - knn_predict(xp, yp, 4, queries)) < 1e-14);
}

TEST_CASE("kernel ridge regression") {
  Eigen::MatrixXd one(1, 1);
  one << 0.0;
  const KRRModel scalar = krr_fit(one, Eigen::VectorXd::Constant(1, 3.0), KernelSpec::gaussian(1.0), 1.0);
  CHECK(scalar.dual_coefficients(0) == doctest::Approx(1.5));

  const Eigen::MatrixXd x = test::random_normal(30, 2, 10);
  const Eigen::VectorXd y = test::random_vector(30, 11);
  const KernelSpec k = KernelSpec::gaussian(0.5);

  const KRRModel heavy = krr_fit(x, y, k, 1e12);
  CHECK(test::max_abs(heavy.dual_coefficients) < 1e-10);
  CHECK(test::max_abs(krr_predict(heavy, x)) < 1e-10);

  const KRRModel light = krr_fit(x, y, k, 1e-10);
  CHECK(test::max_abs(krr_predict(light, x) - y) < 1e-3);

  for (double gamma : {1e-6, 1e-2, 1.0}) {
    const KRRModel m = krr_fit(x, y, k, gamma);
    const Eigen::MatrixXd kk = gram_matrix(k, x);
    const Eigen::VectorXd r = (kk + 30.0 * gamma * Eigen::MatrixXd::Identity(30, 30)) * m.dual_coefficients - y;
    CHECK(test::max_abs(r) / test::max_abs(y) <= 1e-8);
  }

  KRRModel doubled = light;
  doubled.dual_coefficients *= 2.0;
  const Eigen::MatrixXd q = test::random_normal(5, 2, 12);
  CHECK(test::max_abs(krr_predict(doubled, q) - 2.0 * krr_predict(light, q)) < 1e-12);
  doubled.dual_coefficients.setZero();
  CHECK(krr_predict(doubled, q).isZero());

  CHECK_THROWS_AS(krr_fit(x, y, k, 0.0), InputError);
  CHECK_THROWS_AS(krr_fit(x, y.head(5), k, 1.0), InputError);
}
