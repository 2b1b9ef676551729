#pragma once

#include <optional>
#include <vector>

#include "modnet/types.hpp"

namespace modnet {

// Predictor matrix of one nodewise regression. Columns are internally
// standardized (mean 0, sample SD 1); col_means/col_sds record the affine
// map back to the input (standardized-variable) scale. Product columns are
// not unit-SD on the input scale, which is why the internal rescaling
// matters for penalty fairness.
struct DesignMatrix {
  Eigen::MatrixXd columns;        // n x K, internal scale
  std::vector<TermId> term_ids;   // K entries, unique
  Eigen::VectorXd col_means;      // input-scale column means
  Eigen::VectorXd col_sds;        // input-scale column SDs (> 0)

  int n() const { return static_cast<int>(columns.rows()); }
  int K() const { return static_cast<int>(columns.cols()); }
};

// Build a DesignMatrix from raw predictor columns on the input scale:
// re-centers and re-scales every column to mean 0 / sample SD 1.
DesignMatrix make_design(Eigen::MatrixXd raw_columns, std::vector<TermId> term_ids);

struct LassoFit {
  double lambda{0.0};
  Eigen::VectorXd coefficients;   // input scale (back-transformed)
  double intercept{0.0};          // input scale
  double rss{0.0};
  int df{0};                      // nonzero coefficients, intercept excluded
  int iterations{0};              // coordinate-descent sweeps
  bool converged{true};

  // Internal-scale coefficients (coefficients * col_sds); kept so that KKT
  // checks and warm starts do not have to re-derive the scaling.
  Eigen::VectorXd internal_coefficients;
};

struct PathConfig {
  int n_lambda{50};
  double lambda_min_ratio{0.01};
  double tol{1e-7};       // max absolute internal-coefficient change per sweep
  int max_iter{10000};    // sweeps
};

struct EbicConfig {
  double gamma{0.5};
};

// sign(z) * max(|z| - t, 0)
double soft_threshold(double z, double t);

// Geometric lambda grid, descending, from lambda_max = max_k |x_k' y| / n
// down to lambda_min_ratio * lambda_max. All-zero y yields the single-entry
// path {0}.
std::vector<double> lambda_path(const DesignMatrix& X, const Eigen::VectorXd& y,
                                const PathConfig& cfg);

// Cyclic coordinate descent for
//   (1/(2n)) * ||y - X b||^2 + lambda * ||b||_1
// on the internal scale; the returned coefficients are back-transformed.
// Non-convergence is reported through the converged flag, not thrown.
LassoFit fit_lasso(const DesignMatrix& X, const Eigen::VectorXd& y, double lambda,
                   const PathConfig& cfg = {},
                   const Eigen::VectorXd* warm_start_internal = nullptr);

// Fits the full lambda_path, warm-starting each fit from the previous
// (larger) lambda.
std::vector<LassoFit> fit_path(const DesignMatrix& X, const Eigen::VectorXd& y,
                               const PathConfig& cfg = {});

// n*ln(rss/n) + df*ln(n) + 2*gamma*df*ln(K). K is the number of candidate
// predictors of the regression. Throws NumericError on rss <= 0.
double ebic(const LassoFit& fit, int n, int K, const EbicConfig& cfg);

// Index of the EBIC-minimal fit; ties broken toward larger lambda (the path
// is descending, so toward the earlier entry). Degenerate rss<=0 fits are
// never selected. Optionally reports the per-fit EBIC trace.
std::size_t select_lambda_index(const std::vector<LassoFit>& path_fits, int n, int K,
                                const EbicConfig& cfg,
                                std::vector<double>* trace = nullptr);

const LassoFit& select_lambda(const std::vector<LassoFit>& path_fits, int n, int K,
                              const EbicConfig& cfg);

// KKT stationarity residuals of a fit, computed from explicit residuals
// (independent of the Gram-based solve path): for zero coefficients
// |x_k' r| / n <= lambda, for nonzero |x_k' r / n - lambda*sign(b_k)| = 0,
// both up to the reported violations.
struct KktReport {
  double max_violation_zero{0.0};
  double max_violation_active{0.0};
  bool ok(double tol = 1e-4) const {
    return max_violation_zero <= tol && max_violation_active <= tol;
  }
};

KktReport kkt_check(const DesignMatrix& X, const Eigen::VectorXd& y,
                    const LassoFit& fit);

}  // namespace modnet
