#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modnet/estimator.hpp"
#include "modnet/sampler.hpp"
#include "modnet/simgen.hpp"
#include "modnet/types.hpp"

namespace modnet {

enum class EstimatorKind { Mnm1, Mnm2, Mnm3, Split };

const char* estimator_name(EstimatorKind kind);
const char* param_type_name(ParamType type);

struct SimConfig {
  std::vector<int> n_grid{30, 43, 63, 92, 133, 193, 280, 407, 591, 858, 1245, 1808};
  int replications{20};
  std::vector<EstimatorKind> estimators{EstimatorKind::Mnm1, EstimatorKind::Mnm2,
                                        EstimatorKind::Mnm3};
  std::uint64_t seed{1};
  AggregationRule rule{AggregationRule::And};
  PathConfig path{};
  EbicConfig ebic{};
  ThresholdConfig threshold{};
  double tau{3.09};
  int burn_in{100};
  int max_attempts_per_case{1000};
  int jobs{1};

  void validate() const;
};

// One row per (replication, n, estimator, parameter type). The estimated /
// true-positive totals describe the whole fitted model of that replication
// and are repeated across its param-type rows.
struct RecoveryRecord {
  int replication{0};
  int n{0};
  EstimatorKind estimator{EstimatorKind::Mnm1};
  ParamType param_type{ParamType::PwUnmod};
  int true_count{0};
  int recovered_count{0};
  int est_pairwise_total{0};
  int est_threeway_total{0};
  int true_positive_pairwise{0};
  int true_positive_threeway{0};
};

struct SimResult {
  std::vector<RecoveryRecord> records;
  std::vector<int> skipped_replications;  // sampler aborts
};

// Main recovery protocol: per replication draw one generating model, sample
// max(n_grid) cases once, and run every requested estimator on the nested
// prefixes. Recovery means a nonzero estimate with the correct sign.
SimResult run_simulation(const SimConfig& cfg);

// Same protocol on the fixed isolated-types model (moderators {1,4}).
// Only MNM-style estimators are meaningful here.
SimResult run_isolated_types(const SimConfig& cfg);

// Edge recovery for node 1 in the p=20 GGMs with k = 1..4 uncorrelated
// neighbors; key = k. Records carry param_type PwUnmod with true_count = k.
// Detection is scored from the regression on node 1 (the curves describe
// that regression's reaction to additional uncorrelated true predictors).
std::map<int, SimResult> run_neighbors_experiment(const SimConfig& cfg);

double sensitivity(const std::vector<RecoveryRecord>& records, EstimatorKind est,
                   ParamType type, int n);
// Pooled over several parameter types (e.g. both pairwise classes).
double sensitivity(const std::vector<RecoveryRecord>& records, EstimatorKind est,
                   const std::vector<ParamType>& types, int n);

enum class ParamClass { Pairwise, Threeway };

// Mean over replications of TP/estimated-total where the total is nonzero;
// std::nullopt (UNDEFINED) when defined in fewer than min_defined
// replications.
std::optional<double> precision(const std::vector<RecoveryRecord>& records,
                                EstimatorKind est, ParamClass cls, int n,
                                int min_defined = 5);

struct SplitResult {
  MnmModel low_model;   // mods = {} GGM on the rows at or below the median
  MnmModel high_model;
  struct Flag {
    int i{0}, j{0};
    int direction_sign{0};  // sign(high - low)
  };
  std::vector<Flag> flagged_edges;
  int n_low{0}, n_high{0};
};

// Split the rows at the moderator's median (ties to the low half), fit a
// nodewise-lasso GGM per half, and flag edges whose half-estimates differ in
// nonzero pattern or sign.
SplitResult median_split_baseline(const RawData& data, int moderator,
                                  AggregationRule rule = AggregationRule::And,
                                  const PathConfig& path_cfg = {},
                                  const EbicConfig& ebic_cfg = {},
                                  const ThresholdConfig& threshold = {}, int jobs = 1);

// Long-format CSV: replication,n,estimator,metric,param_type_or_class,value
void write_records_csv(std::ostream& out, const std::vector<RecoveryRecord>& records);

// Four tables (one per parameter type), rows = estimator x metric, columns
// = n; UNDEFINED precision rendered as an empty cell.
std::string summary_tables(const SimResult& result, const SimConfig& cfg);

}  // namespace modnet
