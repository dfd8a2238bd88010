#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "bitscreen/errors.hpp"
#include "bitscreen/posterior.hpp"
#include "test_util.hpp"

using namespace bitscreen;

namespace {

// Independent evaluation of the marginal log posterior: eigenvalues for the
// log determinant and a stacked least-squares QR for the ridge RSS. Shares no
// code with the implementation path.
double qr_log_posterior(const Eigen::MatrixXd& x_full, const Eigen::VectorXd& ytil,
                        const ModelIndex& gamma, double lambda, double w) {
  const Eigen::Index n = x_full.rows();
  const Eigen::Index k = static_cast<Eigen::Index>(gamma.size());
  double log_det = 0.0;
  double rss = ytil.squaredNorm();
  if (k > 0) {
    Eigen::MatrixXd xg(n, k);
    for (Eigen::Index c = 0; c < k; ++c) xg.col(c) = x_full.col(gamma[static_cast<std::size_t>(c)]);
    Eigen::MatrixXd gram = xg.transpose() * xg + lambda * Eigen::MatrixXd::Identity(k, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    for (Eigen::Index c = 0; c < k; ++c) log_det += std::log(es.eigenvalues()[c]);
    Eigen::MatrixXd stacked(n + k, k);
    stacked.topRows(n) = xg;
    stacked.bottomRows(k) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + k);
    rhs.head(n) = ytil;
    Eigen::VectorXd beta = stacked.colPivHouseholderQr().solve(rhs);
    rss = (ytil - xg * beta).squaredNorm() + lambda * beta.squaredNorm();
  }
  return 0.5 * k * std::log(lambda) - 0.5 * log_det -
         0.5 * static_cast<double>(n - 1) * std::log(rss) +
         k * (std::log(w) - std::log1p(-w));
}

// n x p matrix with exactly orthogonal, centered, norm-sqrt(n) columns.
Eigen::MatrixXd orthogonal_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  REQUIRE(p <= n - 1);
  Eigen::MatrixXd g(n, p + 1);
  g.col(0) = Eigen::VectorXd::Ones(n);
  g.rightCols(p) = testutil::gaussian_matrix(n, p, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p + 1);
  return std::sqrt(static_cast<double>(n)) * q.rightCols(p);
}

}  // namespace

TEST_CASE("null model value") {
  auto z = testutil::gaussian_matrix(20, 4, 1);
  auto d = standardize(z);
  bitscreen::Rng rng(2);
  auto y = center_response(rng.normal_vector(20));
  Hyperparams h{1.5, 0.2};
  CHECK(log_posterior_exact(d, y, {}, h) ==
        doctest::Approx(-0.5 * 19.0 * std::log(y.norm2)).epsilon(1e-12));
  CHECK(null_log_posterior(y, 20) ==
        doctest::Approx(-0.5 * 19.0 * std::log(y.norm2)).epsilon(1e-12));
}

TEST_CASE("orthogonal-to-response column adds only the penalty terms") {
  const Eigen::Index n = 16;
  Eigen::MatrixXd x = orthogonal_design(n, 3, 33);
  auto d = standardize(x);
  // response aligned with column 2 only => X_0^T y = 0 after centering
  Eigen::VectorXd yraw = x.col(2);
  auto y = center_response(yraw);
  CHECK(std::abs(x_col_dot(d, 0, y.y_tilde)) < 1e-8);
  Hyperparams h{2.0, 0.3};
  double got = log_posterior_exact(d, y, {0}, h);
  double want = null_log_posterior(y, n) + 0.5 * std::log(h.lambda) -
                0.5 * std::log(static_cast<double>(n) + h.lambda) + h.log_prior_odds();
  CHECK(got == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("matches the QR route on random models") {
  const Eigen::Index n = 30, p = 6;
  auto inst = testutil::gaussian_instance(n, p, 2, 1.0, 0.8, 301);
  auto d = standardize(inst.z);
  auto y = center_response(inst.y);
  Eigen::MatrixXd x = testutil::materialize_x(inst.z);
  for (double lambda : {0.1, 1.0, 25.0}) {
    Hyperparams h{lambda, 0.1};
    for (ModelIndex gamma : {ModelIndex{0, 2, 5}, ModelIndex{1}, ModelIndex{0, 1, 2, 3, 4, 5}}) {
      double got = log_posterior_exact(d, y, gamma, h);
      double want = qr_log_posterior(x, y.y_tilde, gamma, lambda, h.w);
      CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("ridge partials with an empty conditioning set") {
  const Eigen::Index n = 24;
  auto z = testutil::gaussian_matrix(n, 5, 41);
  auto d = standardize(z);
  bitscreen::Rng rng(42);
  auto y = center_response(rng.normal_vector(n));
  Hyperparams h{3.0, 0.1};
  auto rp = ridge_partials(d, y, {}, 2, h);
  CHECK(rp.v_cond == doctest::Approx(1.0 + h.lambda / n).epsilon(1e-10));
  CHECK(rp.v_xy == doctest::Approx(x_col_dot(d, 2, y.y_tilde) / n).epsilon(1e-10));
  CHECK(rp.v_resid == doctest::Approx(y.norm2 / n).epsilon(1e-12));
  // sign convention: leading minus
  CHECK(rp.r * rp.v_xy <= 0.0);
}

TEST_CASE("orthogonal design reduces R^2 to the marginal form") {
  const Eigen::Index n = 32;
  Eigen::MatrixXd x = orthogonal_design(n, 6, 55);
  auto d = standardize(x);
  Eigen::VectorXd yraw = 2.0 * x.col(0) + 0.5 * x.col(3);
  bitscreen::Rng rng(56);
  yraw += 0.3 * rng.normal_vector(n);
  auto y = center_response(yraw);
  Hyperparams h{4.0, 0.1};
  ModelIndex gamma{0, 3};
  auto rp = ridge_partials(d, y, gamma, 5, h);
  const double nld = static_cast<double>(n) + h.lambda;
  const double rss = static_cast<double>(n) * rp.v_resid;
  const double riy = x_col_dot(d, 5, y.y_tilde);
  CHECK(rp.r2() == doctest::Approx(riy * riy / (nld * rss)).epsilon(1e-8));
}

TEST_CASE("lambda -> 0 recovers the classical partial correlation") {
  const Eigen::Index n = 40, p = 7;
  auto inst = testutil::gaussian_instance(n, p, 3, 1.0, 1.0, 61);
  auto d = standardize(inst.z);
  auto y = center_response(inst.y);
  Eigen::MatrixXd x = testutil::materialize_x(inst.z);
  ModelIndex gamma{1, 4};
  const Eigen::Index i = 6;
  Hyperparams h{1e-9, 0.1};
  auto rp = ridge_partials(d, y, gamma, i, h);

  Eigen::MatrixXd xg(n, 2);
  xg << x.col(1), x.col(4);
  auto proj = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - xg * xg.colPivHouseholderQr().solve(v);
  };
  Eigen::VectorXd ry = proj(y.y_tilde);
  Eigen::VectorXd ri = proj(x.col(i));
  double classical = ry.dot(ri) / std::sqrt(ry.squaredNorm() * ri.squaredNorm());
  CHECK(std::abs(rp.r) == doctest::Approx(std::abs(classical)).epsilon(1e-6));
}

TEST_CASE("posterior ratio identity against the direct difference") {
  bitscreen::Rng pick(99);
  int checked = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 25, p = 8;
    auto inst = testutil::gaussian_instance(n, p, 3, 1.2, 1.0, 700 + rep);
    auto d = standardize(inst.z);
    auto y = center_response(inst.y);
    Hyperparams h{0.25 + 10.0 * pick.uniform(), 0.05 + 0.85 * pick.uniform()};
    ModelIndex gamma;
    for (Eigen::Index j = 0; j < p; ++j)
      if (pick.uniform() < 0.35 && static_cast<Eigen::Index>(gamma.size()) < n - 2)
        gamma.push_back(j);
    Eigen::Index i = static_cast<Eigen::Index>(pick.raw() % p);
    if (std::binary_search(gamma.begin(), gamma.end(), i)) continue;
    double lr = log_posterior_ratio_via_partials(d, y, gamma, i, h);
    ModelIndex plus = gamma;
    plus.insert(std::upper_bound(plus.begin(), plus.end(), i), i);
    double direct = log_posterior_exact(d, y, plus, h) - log_posterior_exact(d, y, gamma, h);
    CHECK(std::abs(lr - direct) < 1e-8);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("zero-correlation candidate ratio and w = 0.5") {
  const Eigen::Index n = 16;
  Eigen::MatrixXd x = orthogonal_design(n, 3, 73);
  auto d = standardize(x);
  auto y = center_response(Eigen::VectorXd(x.col(2)));
  Hyperparams h{2.0, 0.5};  // log odds = 0
  double lr = log_posterior_ratio_via_partials(d, y, {}, 0, h);
  auto rp = ridge_partials(d, y, {}, 0, h);
  CHECK(rp.r2() < 1e-12);
  CHECK(lr == doctest::Approx(0.5 * std::log(h.lambda / n) - 0.5 * std::log(rp.v_cond))
                  .epsilon(1e-9));
}

TEST_CASE("RSS identity, shrinkage monotonicity and bounds") {
  const Eigen::Index n = 35, p = 6;
  auto inst = testutil::gaussian_instance(n, p, 2, 1.5, 1.0, 81);
  auto d = standardize(inst.z);
  auto y = center_response(inst.y);
  Eigen::MatrixXd x = testutil::materialize_x(inst.z);
  ModelIndex gamma{0, 2, 3};
  Eigen::MatrixXd xg(n, 3);
  xg << x.col(0), x.col(2), x.col(3);
  double rss_ols =
      (y.y_tilde - xg * xg.colPivHouseholderQr().solve(y.y_tilde)).squaredNorm();

  double prev = 0.0;
  bool first = true;
  for (double lambda : {1e-6, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4}) {
    Hyperparams h{lambda, 0.1};
    auto rp = ridge_partials(d, y, gamma, 5, h);
    double rss = static_cast<double>(n) * rp.v_resid;
    CHECK(rss >= rss_ols - 1e-8);
    CHECK(rss <= y.norm2 + 1e-12);
    if (!first) CHECK(rss >= prev - 1e-10);
    prev = rss;
    first = false;
  }
}

TEST_CASE("oracle greedy path basics") {
  SUBCASE("dominant marginal correlation goes first") {
    const Eigen::Index n = 20;
    Eigen::MatrixXd x = orthogonal_design(n, 2, 91);
    Eigen::VectorXd yraw = 2.0 * x.col(0);
    bitscreen::Rng rng(92);
    yraw += 1e-3 * rng.normal_vector(n);
    auto d = standardize(x);
    auto y = center_response(yraw);
    Hyperparams h{1.0, 0.1};
    auto res = oracle_greedy_path(d, y, h, 2);
    CHECK(res.path[0] == 0);
  }
  SUBCASE("zero steps returns the null trace") {
    auto z = testutil::gaussian_matrix(10, 3, 93);
    auto d = standardize(z);
    bitscreen::Rng rng(94);
    auto y = center_response(rng.normal_vector(10));
    Hyperparams h{1.0, 0.1};
    auto res = oracle_greedy_path(d, y, h, 0);
    CHECK(res.path.empty());
    REQUIRE(res.trace.size() == 1);
    CHECK(res.trace[0] == doctest::Approx(null_log_posterior(y, 10)));
  }
  SUBCASE("path does not depend on w") {
    auto inst = testutil::gaussian_instance(40, 10, 3, 1.0, 1.0, 95);
    auto d = standardize(inst.z);
    auto y = center_response(inst.y);
    auto r1 = oracle_greedy_path(d, y, {1.0, 0.01}, 6);
    auto r2 = oracle_greedy_path(d, y, {1.0, 0.9}, 6);
    CHECK(r1.path == r2.path);
  }
  SUBCASE("p guard") {
    auto z = testutil::gaussian_matrix(5, 12, 96);
    auto d = standardize(z);
    bitscreen::Rng rng(97);
    auto y = center_response(rng.normal_vector(5));
    CHECK_THROWS_AS(oracle_greedy_path(d, y, {1.0, 0.1}, 2, 10), config_error);
  }
}

TEST_CASE("model validation errors") {
  auto z = testutil::gaussian_matrix(10, 4, 98);
  auto d = standardize(z);
  bitscreen::Rng rng(99);
  auto y = center_response(rng.normal_vector(10));
  Hyperparams h{1.0, 0.1};
  CHECK_THROWS_AS(log_posterior_exact(d, y, {2, 1}, h), input_error);   // unsorted
  CHECK_THROWS_AS(log_posterior_exact(d, y, {1, 1}, h), input_error);   // duplicate
  CHECK_THROWS_AS(log_posterior_exact(d, y, {99}, h), input_error);     // out of range
  CHECK_THROWS_AS(ridge_partials(d, y, {1}, 1, h), input_error);        // i in gamma
  CHECK_THROWS_AS(log_posterior_exact(d, y, {0}, {-1.0, 0.1}), config_error);
  CHECK_THROWS_AS(log_posterior_exact(d, y, {0}, {1.0, 1.5}), config_error);
}
