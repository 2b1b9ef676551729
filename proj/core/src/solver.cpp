#include "modnet/solver.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <set>

namespace modnet {

DesignMatrix make_design(Eigen::MatrixXd raw_columns, std::vector<TermId> term_ids) {
  const int n = static_cast<int>(raw_columns.rows());
  const int K = static_cast<int>(raw_columns.cols());
  if (static_cast<int>(term_ids.size()) != K)
    throw std::invalid_argument("make_design: term id count mismatch");
  if (std::set<TermId>(term_ids.begin(), term_ids.end()).size() != term_ids.size())
    throw std::invalid_argument("make_design: duplicate term ids");
  if (n < 2) throw DataError("make_design: need at least 2 rows");

  DesignMatrix d;
  d.col_means.resize(K);
  d.col_sds.resize(K);
  for (int k = 0; k < K; ++k) {
    const double mean = raw_columns.col(k).mean();
    const double ss = (raw_columns.col(k).array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0))
      throw DataError("degenerate design column " + std::to_string(k + 1) +
                      " (zero variance)");
    d.col_means(k) = mean;
    d.col_sds(k) = sd;
    raw_columns.col(k) = (raw_columns.col(k).array() - mean) / sd;
  }
  d.columns = std::move(raw_columns);
  d.term_ids = std::move(term_ids);
  return d;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

std::vector<double> lambda_path(const DesignMatrix& X, const Eigen::VectorXd& y,
                                const PathConfig& cfg) {
  if (!(cfg.lambda_min_ratio > 0.0 && cfg.lambda_min_ratio < 1.0))
    throw std::invalid_argument("lambda_min_ratio must be in (0,1)");
  if (cfg.n_lambda < 1) throw std::invalid_argument("n_lambda must be >= 1");
  const int n = X.n();
  double lambda_max = 0.0;
  for (int k = 0; k < X.K(); ++k)
    lambda_max = std::max(lambda_max, std::abs(X.columns.col(k).dot(y)) / n);
  if (lambda_max == 0.0) return {0.0};
  std::vector<double> path(static_cast<std::size_t>(cfg.n_lambda));
  if (cfg.n_lambda == 1) {
    path[0] = lambda_max;
    return path;
  }
  const double log_max = std::log(lambda_max);
  const double log_ratio = std::log(cfg.lambda_min_ratio);
  for (int t = 0; t < cfg.n_lambda; ++t)
    path[static_cast<std::size_t>(t)] =
        std::exp(log_max + log_ratio * t / (cfg.n_lambda - 1));
  path[0] = lambda_max;  // exact, so the first fit has df = 0 by KKT
  return path;
}

namespace {

// Precomputed quantities shared along a path.
struct Workspace {
  Eigen::MatrixXd gram;   // X'X
  Eigen::VectorXd xty;    // X'y
  double yty{0.0};

  Workspace(const DesignMatrix& X, const Eigen::VectorXd& y) {
    gram.noalias() = X.columns.transpose() * X.columns;
    xty.noalias() = X.columns.transpose() * y;
    yty = y.squaredNorm();
  }
};

#ifndef NDEBUG
double objective(const Workspace& w, const Eigen::VectorXd& b, double lambda, int n) {
  const double quad = w.yty - 2.0 * b.dot(w.xty) + b.dot(w.gram * b);
  return quad / (2.0 * n) + lambda * b.lpNorm<1>();
}
#endif

// Cyclic coordinate descent on the internal scale. b is the warm start on
// entry and the solution on exit. Returns the number of sweeps.
int coordinate_descent(const Workspace& w, int n, double lambda, Eigen::VectorXd& b,
                       const PathConfig& cfg, bool* converged) {
  const int K = static_cast<int>(b.size());
  Eigen::VectorXd gram_b = w.gram * b;
#ifndef NDEBUG
  double prev_obj = objective(w, b, lambda, n);
#endif
  int sweep = 0;
  *converged = false;
  for (; sweep < cfg.max_iter; ++sweep) {
    double max_change = 0.0;
    for (int k = 0; k < K; ++k) {
      const double diag = w.gram(k, k);
      if (diag <= 0.0) continue;
      const double u = (w.xty(k) - gram_b(k) + diag * b(k)) / n;
      const double bk_new = soft_threshold(u, lambda) / (diag / n);
      const double delta = bk_new - b(k);
      if (delta != 0.0) {
        gram_b.noalias() += delta * w.gram.col(k);
        b(k) = bk_new;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
#ifndef NDEBUG
    const double obj = objective(w, b, lambda, n);
    assert(obj <= prev_obj + 1e-10 * (1.0 + std::abs(prev_obj)) &&
           "coordinate descent objective increased");
    prev_obj = obj;
#endif
    if (max_change <= cfg.tol) {
      *converged = true;
      ++sweep;
      break;
    }
  }
  return sweep;
}

LassoFit finish_fit(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                    Eigen::VectorXd b_internal, int sweeps, bool converged) {
  LassoFit fit;
  fit.lambda = lambda;
  fit.iterations = sweeps;
  fit.converged = converged;
  const Eigen::VectorXd residual = y - X.columns * b_internal;
  fit.rss = residual.squaredNorm();
  fit.df = static_cast<int>((b_internal.array() != 0.0).count());
  fit.coefficients = (b_internal.array() / X.col_sds.array()).matrix();
  fit.intercept = -(b_internal.array() * X.col_means.array() / X.col_sds.array()).sum();
  fit.internal_coefficients = std::move(b_internal);
  return fit;
}

}  // namespace

LassoFit fit_lasso(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                   const PathConfig& cfg, const Eigen::VectorXd* warm_start_internal) {
  if (y.size() != X.n()) throw std::invalid_argument("fit_lasso: y size mismatch");
  if (lambda < 0.0) throw std::invalid_argument("fit_lasso: lambda must be >= 0");
  Workspace w(X, y);
  Eigen::VectorXd b = warm_start_internal && warm_start_internal->size() == X.K()
                          ? *warm_start_internal
                          : Eigen::VectorXd::Zero(X.K());
  bool converged = false;
  const int sweeps = coordinate_descent(w, X.n(), lambda, b, cfg, &converged);
  return finish_fit(X, y, lambda, std::move(b), sweeps, converged);
}

std::vector<LassoFit> fit_path(const DesignMatrix& X, const Eigen::VectorXd& y,
                               const PathConfig& cfg) {
  const auto lambdas = lambda_path(X, y, cfg);
  Workspace w(X, y);
  std::vector<LassoFit> fits;
  fits.reserve(lambdas.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(X.K());
  for (double lambda : lambdas) {
    bool converged = false;
    const int sweeps = coordinate_descent(w, X.n(), lambda, b, cfg, &converged);
    fits.push_back(finish_fit(X, y, lambda, b, sweeps, converged));
  }
  return fits;
}

double ebic(const LassoFit& fit, int n, int K, const EbicConfig& cfg) {
  if (!std::isfinite(cfg.gamma)) throw std::invalid_argument("ebic: gamma not finite");
  if (!(fit.rss > 0.0))
    throw NumericError("ebic: zero residual sum of squares (interpolating fit)");
  return n * std::log(fit.rss / n) + fit.df * std::log(static_cast<double>(n)) +
         2.0 * cfg.gamma * fit.df * std::log(static_cast<double>(K));
}

std::size_t select_lambda_index(const std::vector<LassoFit>& path_fits, int n, int K,
                                const EbicConfig& cfg, std::vector<double>* trace) {
  if (path_fits.empty()) throw std::invalid_argument("select_lambda: empty path");
  if (trace) trace->assign(path_fits.size(), std::numeric_limits<double>::quiet_NaN());
  std::size_t best = path_fits.size();
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path_fits.size(); ++i) {
    if (!(path_fits[i].rss > 0.0)) continue;  // degenerate interpolation
    const double score = ebic(path_fits[i], n, K, cfg);
    if (trace) (*trace)[i] = score;
    if (score < best_score) {  // strict: ties keep the earlier (larger) lambda
      best_score = score;
      best = i;
    }
  }
  if (best == path_fits.size())
    throw NumericError("select_lambda: every path fit is degenerate (rss = 0)");
  return best;
}

const LassoFit& select_lambda(const std::vector<LassoFit>& path_fits, int n, int K,
                              const EbicConfig& cfg) {
  return path_fits[select_lambda_index(path_fits, n, K, cfg)];
}

KktReport kkt_check(const DesignMatrix& X, const Eigen::VectorXd& y,
                    const LassoFit& fit) {
  const int n = X.n();
  const Eigen::VectorXd residual = y - X.columns * fit.internal_coefficients;
  const Eigen::VectorXd corr = X.columns.transpose() * residual / n;
  KktReport rep;
  for (int k = 0; k < X.K(); ++k) {
    const double bk = fit.internal_coefficients(k);
    if (bk == 0.0) {
      rep.max_violation_zero =
          std::max(rep.max_violation_zero, std::abs(corr(k)) - fit.lambda);
    } else {
      const double sign = bk > 0.0 ? 1.0 : -1.0;
      rep.max_violation_active =
          std::max(rep.max_violation_active, std::abs(corr(k) - fit.lambda * sign));
    }
  }
  rep.max_violation_zero = std::max(rep.max_violation_zero, 0.0);
  return rep;
}

}  // namespace modnet
