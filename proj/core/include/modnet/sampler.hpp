#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "modnet/simgen.hpp"
#include "modnet/types.hpp"

namespace modnet {

struct SamplerConfig {
  double tau{3.09};                 // 99.9% quantile of the standard normal
  int burn_in{100};                 // full Gibbs sweeps per chain
  int max_attempts_per_case{1000};
  std::uint64_t seed{0};
  int jobs{1};
};

struct SampleBatch {
  Eigen::MatrixXd data;             // n_cases x p, all |entries| <= tau
  long rejected_chains{0};
  long attempted_chains{0};
  double rejection_rate{0.0};
};

// mu_s = alpha_s + sum_{i != s} beta_{i,s} x_i
//        + sum_{i<j, i,j != s} omega_{i,j,s} x_i x_j
// with canonical-key lookup; each unordered pair counted once.
double conditional_mean(const MnmModel& model, int s, const Eigen::VectorXd& x);

// One independent chain per case: initialize every variable from a standard
// normal, run burn_in sweeps updating X_s ~ N(mu_s, sigma_s) in ascending
// index order, and deliver the post-burn-in state. A chain whose final state
// leaves [-tau, tau] (or turns non-finite) is rejected and restarted with a
// fresh initialization from the same per-case substream (seed xor case
// index). Throws NumericError once a case exceeds max_attempts_per_case.
SampleBatch gibbs_sample(const MnmModel& model, int n_cases, const SamplerConfig& cfg);

struct ScreenEntry {
  std::size_t index{0};             // position in the candidate list
  double rejection_rate{1.0};
  bool aborted{false};
};

// Samples n_probe cases per candidate, orders by ascending rejection rate
// (stable), and keeps the first ceil(keep_ratio * len). Aborting candidates
// count as rejection rate 1.
std::vector<ScreenEntry> screen_models(const std::vector<MnmModel>& candidates,
                                       int n_probe, const SamplerConfig& cfg,
                                       double keep_ratio = 100.0 / 130.0);

// Rejection-bias sanity check: sample n cases, run unregularized least
// squares per node with the informed moderator design, and average the
// estimates of each true-parameter class.
struct BiasCheckResult {
  std::map<ParamType, double> per_type_mean;  // present only for nonempty classes
  double mean_all_pairwise{0.0};              // mean over every candidate estimate
  double mean_all_threeway{0.0};
  double rejection_rate{0.0};
  int n{0};
};

BiasCheckResult bias_check(const GeneratingModelInfo& info, int n,
                           const SamplerConfig& cfg);

// The least-squares half of bias_check, usable on externally supplied data
// (e.g. untruncated synthetic Gaussians in tests). Returns per-node OLS
// coefficient maps keyed like the model parameters.
struct NodewiseOls {
  std::map<PairKey, std::vector<double>> pairwise;    // 2 estimates per key
  std::map<TripleKey, std::vector<double>> threeway;  // 3 estimates per key
};
NodewiseOls ols_nodewise(const StandardizedData& data, const ModeratorSet& mods);

}  // namespace modnet
