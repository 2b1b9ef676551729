#pragma once

#include <vector>

#include "modnet/solver.hpp"
#include "modnet/standardize.hpp"
#include "modnet/types.hpp"

namespace modnet {

// Result of the EBIC-selected lasso regression on one node. term_ids[k]
// labels coefficient k: Main(j) for the main effect of X_j, or the
// ThreeWay id of the product column (always excluding s from its pair).
// `coefficients` holds the aggregation-ready estimates (the selected fit's
// values after thresholding); `selected` keeps the raw lasso fit whose
// KKT conditions are checked.
struct NodewiseFit {
  int node{0};                      // 1-based response index s
  Eigen::VectorXd coefficients;
  LassoFit selected;
  std::vector<TermId> term_ids;
  std::vector<double> ebic_trace;   // per-path-lambda EBIC scores
  std::vector<double> lambda_grid;
  double sigma_resid{1.0};          // residual SD, divisor n - df - 1
};

// Post-selection thresholding of nodewise estimates, as applied by the
// reference estimation software: with SqrtLogPOverN, estimates smaller in
// magnitude than sqrt(ln(p)/n) are set to zero before aggregation. The
// cutoff vanishes as n grows, so large-n recovery is unaffected while
// barely-selected small-n estimates are dropped.
enum class ThresholdRule { None, SqrtLogPOverN };
struct ThresholdConfig {
  ThresholdRule rule{ThresholdRule::SqrtLogPOverN};
  double cutoff(int p, int n) const;
};

enum class AggregationRule { And, Or };

// Version (2) of the estimator: one full fit per candidate moderator plus
// their union.
struct CombinedSequentialModel {
  std::vector<MnmModel> per_moderator_models;  // index m-1 holds mods={m}
  MnmModel union_model;
};

// Predictors for the regression on node s: {X_j : j != s} followed by the
// admissible products {X_i*X_j : i<j, i,j != s, {i,j,s} touches mods},
// both in ascending index order.
DesignMatrix build_design(const StandardizedData& data, int s, const ModeratorSet& mods);

std::vector<NodewiseFit> fit_nodewise(const StandardizedData& data,
                                      const ModeratorSet& mods,
                                      const PathConfig& path_cfg = {},
                                      const EbicConfig& ebic_cfg = {},
                                      const ThresholdConfig& threshold = {},
                                      int jobs = 1);

// Combine the p regressions into one joint model. Every pairwise parameter
// gathers exactly 2 nodewise estimates, every 3-way parameter exactly 3.
// OR: arithmetic mean of the gathered values (zeros included), zero only
// when all are zero. AND: mean when all gathered values are nonzero, else 0.
MnmModel aggregate(const std::vector<NodewiseFit>& fits, AggregationRule rule);

MnmModel fit_mnm(const RawData& data, const ModeratorSet& mods, AggregationRule rule,
                 const PathConfig& path_cfg = {}, const EbicConfig& ebic_cfg = {},
                 const ThresholdConfig& threshold = {}, int jobs = 1);
MnmModel fit_mnm(const StandardizedData& data, const ModeratorSet& mods,
                 AggregationRule rule, const PathConfig& path_cfg = {},
                 const EbicConfig& ebic_cfg = {},
                 const ThresholdConfig& threshold = {}, int jobs = 1);

CombinedSequentialModel fit_sequential(const RawData& data, AggregationRule rule,
                                       const PathConfig& path_cfg = {},
                                       const EbicConfig& ebic_cfg = {},
                                       const ThresholdConfig& threshold = {},
                                       int jobs = 1);
CombinedSequentialModel fit_sequential(const StandardizedData& data,
                                       AggregationRule rule,
                                       const PathConfig& path_cfg = {},
                                       const EbicConfig& ebic_cfg = {},
                                       const ThresholdConfig& threshold = {},
                                       int jobs = 1);

// Union across per-moderator models: a parameter is nonzero iff nonzero in
// at least one model; its value is the mean over the models where it is
// nonzero, except that on sign disagreement the largest-magnitude value is
// kept. Sigma is averaged.
MnmModel sequential_union(const std::vector<MnmModel>& models);

// Aggregate weight and sign of the interaction named by 2 or 3 sorted
// indices; absent keys report (0, 0).
struct InteractionInfo {
  double weight{0.0};
  int sign{0};
};
InteractionInfo show_interaction(const MnmModel& model, const std::vector<int>& indices);

}  // namespace modnet
