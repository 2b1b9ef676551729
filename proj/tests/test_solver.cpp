#include <doctest.h>

#include <cmath>

#include "modnet/rng.hpp"
#include "modnet/solver.hpp"

using namespace modnet;

namespace {

// Random design on the input scale: K columns with mild shared correlation.
Eigen::MatrixXd random_columns(int n, int K, std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  Eigen::MatrixXd X(n, K);
  Eigen::VectorXd shared(n);
  for (int i = 0; i < n; ++i) shared(i) = rng.next_normal();
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < n; ++i) X(i, k) = rng.next_normal() + 0.3 * shared(i);
  return X;
}

std::vector<TermId> main_ids(int K) {
  std::vector<TermId> ids;
  for (int k = 1; k <= K; ++k) ids.push_back(TermId::main(k));
  return ids;
}

// 8x8 Hadamard matrix; its non-constant columns are mutually orthogonal with
// mean 0 and squared norm exactly n.
Eigen::MatrixXd hadamard8() {
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  for (int size = 1; size < 8; size *= 2) {
    Eigen::MatrixXd next(2 * size, 2 * size);
    next.topLeftCorner(size, size) = h;
    next.topRightCorner(size, size) = h;
    next.bottomLeftCorner(size, size) = h;
    next.bottomRightCorner(size, size) = -h;
    h = next;
  }
  return h;
}

DesignMatrix identity_scaled_design(Eigen::MatrixXd cols, std::vector<TermId> ids) {
  DesignMatrix d;
  d.col_means = Eigen::VectorXd::Zero(cols.cols());
  d.col_sds = Eigen::VectorXd::Ones(cols.cols());
  d.columns = std::move(cols);
  d.term_ids = std::move(ids);
  return d;
}

}  // namespace

TEST_CASE("soft threshold definition") {
  CHECK(soft_threshold(0.5, 0.2) == doctest::Approx(0.3));
  CHECK(soft_threshold(-0.1, 0.2) == 0.0);
  CHECK(soft_threshold(-0.5, 0.2) == doctest::Approx(-0.3));
  for (double x : {-2.0, -0.3, 0.0, 0.7, 5.0}) CHECK(soft_threshold(x, 0.0) == x);
}

TEST_CASE("lambda path: top of the path and geometric spacing") {
  const int n = 50;
  Eigen::MatrixXd col = random_columns(n, 1, 7);
  DesignMatrix X = make_design(col, main_ids(1));
  const Eigen::VectorXd y = X.columns.col(0);  // x == y, both unit sample SD

  PathConfig cfg;
  cfg.n_lambda = 3;
  cfg.lambda_min_ratio = 0.01;
  const auto path = lambda_path(X, y, cfg);
  REQUIRE(path.size() == 3);
  CHECK(path[0] == doctest::Approx(static_cast<double>(n - 1) / n).epsilon(1e-12));
  CHECK(path[1] == doctest::Approx(0.1 * path[0]).epsilon(1e-12));
  CHECK(path[2] == doctest::Approx(0.01 * path[0]).epsilon(1e-12));

  // at lambda >= lambda_max the fit is empty
  const LassoFit at_max = fit_lasso(X, y, path[0]);
  CHECK(at_max.df == 0);
  const LassoFit above = fit_lasso(X, y, path[0] * 1.5);
  CHECK(above.df == 0);
}

TEST_CASE("lambda path: all-zero response collapses to a single zero") {
  DesignMatrix X = make_design(random_columns(40, 3, 8), main_ids(3));
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(40);
  const auto path = lambda_path(X, y, PathConfig{});
  REQUIRE(path.size() == 1);
  CHECK(path[0] == 0.0);
}

TEST_CASE("lasso at lambda=0 equals the normal-equations solution") {
  const int n = 80, K = 6;
  Xoshiro256pp rng(11);
  Eigen::MatrixXd cols = random_columns(n, K, 12);
  DesignMatrix X = make_design(cols, main_ids(K));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i)
    y(i) = 0.8 * X.columns(i, 0) - 0.5 * X.columns(i, 3) + rng.next_normal();
  y.array() -= y.mean();

  PathConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iter = 200000;
  const LassoFit fit = fit_lasso(X, y, 0.0, cfg);
  REQUIRE(fit.converged);

  const Eigen::VectorXd ols_internal =
      (X.columns.transpose() * X.columns).ldlt().solve(X.columns.transpose() * y);
  const Eigen::VectorXd ols = (ols_internal.array() / X.col_sds.array()).matrix();
  CHECK((fit.coefficients - ols).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("orthogonal design matches the soft-threshold closed form") {
  const Eigen::MatrixXd h = hadamard8();
  Eigen::MatrixXd cols(8, 4);
  for (int k = 0; k < 4; ++k) cols.col(k) = h.col(k + 1);
  DesignMatrix X = identity_scaled_design(cols, main_ids(4));

  Eigen::VectorXd y(8);
  y << 0.9, -0.3, 0.2, 1.4, -0.8, 0.1, -0.2, 0.5;
  y.array() -= y.mean();

  for (double lambda : {0.0, 0.05, 0.12, 0.4}) {
    const LassoFit fit = fit_lasso(X, y, lambda);
    for (int k = 0; k < 4; ++k) {
      const double expected = soft_threshold(X.columns.col(k).dot(y) / 8.0, lambda);
      CHECK(std::abs(fit.coefficients(k) - expected) < 1e-8);
    }
  }
}

TEST_CASE("path fits: warm starts, monotone rss, empty top") {
  const int n = 120, K = 8;
  Xoshiro256pp rng(21);
  DesignMatrix X = make_design(random_columns(n, K, 22), main_ids(K));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i)
    y(i) = 0.6 * X.columns(i, 1) + 0.4 * X.columns(i, 5) + rng.next_normal();
  y.array() -= y.mean();

  const auto fits = fit_path(X, y, PathConfig{});
  REQUIRE(fits.size() == 50);
  CHECK(fits.front().df == 0);
  for (std::size_t i = 1; i < fits.size(); ++i)
    CHECK(fits[i].rss <= fits[i - 1].rss * (1.0 + 1e-12));
  CHECK(fits.back().rss <= fits.front().rss);
}

TEST_CASE("single-predictor path follows the closed form and grows monotonically") {
  const int n = 100;
  Xoshiro256pp rng(31);
  Eigen::MatrixXd col(n, 1);
  for (int i = 0; i < n; ++i) col(i, 0) = rng.next_normal();
  DesignMatrix X = make_design(col, main_ids(1));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = 0.5 * X.columns(i, 0) + rng.next_normal();
  y.array() -= y.mean();

  const double c = X.columns.col(0).dot(y) / n;
  const double d = X.columns.col(0).squaredNorm() / n;
  double prev = -1.0;
  for (const auto& fit : fit_path(X, y, PathConfig{})) {
    const double expected = soft_threshold(c, fit.lambda) / d;
    CHECK(fit.internal_coefficients(0) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(fit.internal_coefficients(0)) >= prev - 1e-12);
    prev = std::abs(fit.internal_coefficients(0));
  }
}

TEST_CASE("pure-noise response keeps the selected model tiny") {
  const int n = 100, K = 20, seeds = 100;
  int small = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    Xoshiro256pp rng(static_cast<std::uint64_t>(900 + seed));
    DesignMatrix X =
        make_design(random_columns(n, K, static_cast<std::uint64_t>(400 + seed)),
                    main_ids(K));
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.next_normal();
    y.array() -= y.mean();
    const auto fits = fit_path(X, y, PathConfig{});
    const LassoFit& sel = select_lambda(fits, n, K, EbicConfig{});
    if (sel.df <= 2) ++small;
  }
  CHECK(small >= 90);
}

TEST_CASE("ebic arithmetic") {
  LassoFit fit;
  fit.rss = 30.0;
  fit.df = 0;
  const int n = 100, K = 78;
  SUBCASE("df=0 reduces to the rss term") {
    CHECK(ebic(fit, n, K, EbicConfig{0.5}) ==
          doctest::Approx(n * std::log(fit.rss / n)));
  }
  SUBCASE("gamma=0 reduces to BIC") {
    fit.df = 4;
    CHECK(ebic(fit, n, K, EbicConfig{0.0}) ==
          doctest::Approx(n * std::log(fit.rss / n) + 4 * std::log(n)));
  }
  SUBCASE("one extra df costs ln(n) + 2 gamma ln(K)") {
    LassoFit f2 = fit, f3 = fit;
    f2.df = 2;
    f3.df = 3;
    const double margin =
        ebic(f3, n, K, EbicConfig{0.5}) - ebic(f2, n, K, EbicConfig{0.5});
    CHECK(margin == doctest::Approx(std::log(100.0) + std::log(78.0)));
    CHECK(margin == doctest::Approx(8.9619).epsilon(1e-4));
  }
  SUBCASE("zero rss is rejected") {
    fit.rss = 0.0;
    CHECK_THROWS_AS(ebic(fit, n, K, EbicConfig{}), NumericError);
  }
}

TEST_CASE("lambda selection: trivial cases and tie-break") {
  std::vector<LassoFit> path(1);
  path[0].rss = 10.0;
  path[0].df = 1;
  path[0].lambda = 0.3;
  CHECK(select_lambda_index(path, 50, 5, EbicConfig{}) == 0);

  // all fits empty: same EBIC everywhere, largest lambda wins
  std::vector<LassoFit> flat(4);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    flat[i].rss = 25.0;
    flat[i].df = 0;
    flat[i].lambda = 1.0 / static_cast<double>(i + 1);
  }
  CHECK(select_lambda_index(flat, 50, 5, EbicConfig{}) == 0);
}

TEST_CASE("planted signals are recovered by the EBIC-selected fit") {
  const int n = 500, K = 13, seeds = 100;
  int good = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    Xoshiro256pp rng(static_cast<std::uint64_t>(5000 + seed));
    DesignMatrix X =
        make_design(random_columns(n, K, static_cast<std::uint64_t>(7000 + seed)),
                    main_ids(K));
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i)
      y(i) = 0.5 * (X.columns(i, 0) + X.columns(i, 1) + X.columns(i, 2)) +
             rng.next_normal();
    y.array() -= y.mean();
    const auto fits = fit_path(X, y, PathConfig{});
    const LassoFit& sel = select_lambda(fits, n, K, EbicConfig{});
    int true_hits = 0, false_hits = 0;
    for (int k = 0; k < K; ++k) {
      if (sel.coefficients(k) == 0.0) continue;
      (k < 3 ? true_hits : false_hits) += 1;
    }
    if (true_hits >= 3 && false_hits <= 1) ++good;
  }
  CHECK(good >= 90);
}

TEST_CASE("KKT conditions hold at every returned fit") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const int n = 150, K = 12;
    Xoshiro256pp rng(seed);
    DesignMatrix X = make_design(random_columns(n, K, seed + 50), main_ids(K));
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i)
      y(i) = 0.4 * X.columns(i, 2) - 0.6 * X.columns(i, 7) + rng.next_normal();
    y.array() -= y.mean();
    for (const auto& fit : fit_path(X, y, PathConfig{})) {
      const KktReport rep = kkt_check(X, y, fit);
      CHECK(rep.ok(1e-4));
    }
  }
}

TEST_CASE("column permutation permutes the solution") {
  const int n = 90, K = 7;
  Xoshiro256pp rng(61);
  Eigen::MatrixXd cols = random_columns(n, K, 62);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = 0.7 * cols(i, 4) + rng.next_normal();
  y.array() -= y.mean();

  DesignMatrix X = make_design(cols, main_ids(K));
  const std::vector<int> perm = {3, 0, 6, 1, 5, 2, 4};
  Eigen::MatrixXd permuted(n, K);
  for (int k = 0; k < K; ++k)
    permuted.col(k) = cols.col(perm[static_cast<std::size_t>(k)]);
  DesignMatrix Xp = make_design(permuted, main_ids(K));

  const double lambda = 0.05;
  PathConfig tight;
  tight.tol = 1e-11;
  const LassoFit a = fit_lasso(X, y, lambda, tight);
  const LassoFit b = fit_lasso(Xp, y, lambda, tight);
  for (int k = 0; k < K; ++k) {
    const int orig = perm[static_cast<std::size_t>(k)];
    CHECK(std::abs(b.coefficients(k) - a.coefficients(orig)) < 1e-9);
    CHECK((b.coefficients(k) == 0.0) == (a.coefficients(orig) == 0.0));
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  const int n = 60, K = 5;
  Xoshiro256pp rng(71);
  DesignMatrix X = make_design(random_columns(n, K, 72), main_ids(K));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.next_normal();
  y.array() -= y.mean();
  PathConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-300;
  const LassoFit fit = fit_lasso(X, y, 0.001, cfg);
  CHECK_FALSE(fit.converged);
}
