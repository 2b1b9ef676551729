#include "modnet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "modnet/parallel.hpp"
#include "modnet/rng.hpp"
#include "modnet/standardize.hpp"

namespace modnet {

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Mnm1: return "MNM1";
    case EstimatorKind::Mnm2: return "MNM2";
    case EstimatorKind::Mnm3: return "MNM3";
    case EstimatorKind::Split: return "SPLIT";
  }
  return "?";
}

const char* param_type_name(ParamType type) {
  switch (type) {
    case ParamType::PwUnmod: return "PW_UNMOD";
    case ParamType::PwOfPartial: return "PW_OF_PARTIAL";
    case ParamType::ModOfPartial: return "MOD_OF_PARTIAL";
    case ParamType::ModFull: return "MOD_FULL";
  }
  return "?";
}

void SimConfig::validate() const {
  if (n_grid.empty()) throw DataError("sim config: empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw DataError("sim config: n grid must be strictly increasing");
  if (n_grid.front() < 4) throw DataError("sim config: smallest n too small");
  if (replications < 1) throw DataError("sim config: replications must be >= 1");
  if (estimators.empty()) throw DataError("sim config: no estimators selected");
}

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

std::uint64_t fnv1a(const double* data, std::size_t count, std::uint64_t h) {
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &data[i], sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::uint64_t prefix_hash(const Eigen::MatrixXd& data, int rows) {
  std::uint64_t h = 14695981039346656037ULL;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < data.cols(); ++c) h = fnv1a(&data(r, c), 1, h);
  return h;
}

std::vector<ParamType> nonempty_types(const GeneratingModelInfo& info) {
  std::vector<ParamType> out;
  for (ParamType t : {ParamType::PwUnmod, ParamType::PwOfPartial,
                      ParamType::ModOfPartial, ParamType::ModFull}) {
    if (!info.true_pairwise(t).empty() || !info.true_threeway(t).empty())
      out.push_back(t);
  }
  return out;
}

void score_model(const MnmModel& est, const GeneratingModelInfo& info,
                 const std::vector<ParamType>& types, int rep, int n,
                 EstimatorKind kind, std::vector<RecoveryRecord>& out) {
  int est_pw = 0, est_tw = 0, tp_pw = 0, tp_tw = 0;
  for (const auto& [key, v] : est.beta) {
    ++est_pw;
    const double truth = info.model.get_beta(key.first, key.second);
    if (truth != 0.0 && sign_of(v) == sign_of(truth)) ++tp_pw;
  }
  for (const auto& [key, v] : est.omega) {
    ++est_tw;
    const double truth = info.model.get_omega(key[0], key[1], key[2]);
    if (truth != 0.0 && sign_of(v) == sign_of(truth)) ++tp_tw;
  }

  for (ParamType t : types) {
    RecoveryRecord rec;
    rec.replication = rep;
    rec.n = n;
    rec.estimator = kind;
    rec.param_type = t;
    rec.est_pairwise_total = est_pw;
    rec.est_threeway_total = est_tw;
    rec.true_positive_pairwise = tp_pw;
    rec.true_positive_threeway = tp_tw;
    for (const auto& key : info.true_pairwise(t)) {
      ++rec.true_count;
      const double v = est.get_beta(key.first, key.second);
      const double truth = info.model.get_beta(key.first, key.second);
      if (v != 0.0 && sign_of(v) == sign_of(truth)) ++rec.recovered_count;
    }
    for (const auto& key : info.true_threeway(t)) {
      ++rec.true_count;
      const double v = est.get_omega(key[0], key[1], key[2]);
      const double truth = info.model.get_omega(key[0], key[1], key[2]);
      if (v != 0.0 && sign_of(v) == sign_of(truth)) ++rec.recovered_count;
    }
    out.push_back(rec);
  }
}

// The moderated pair behind a true 3-way key, looked up from the generator
// bookkeeping. Returns false when the triple is not one of the true params.
bool moderated_pair_of(const GeneratingModelInfo& info, const TripleKey& key,
                       PairKey& pair) {
  for (const auto& [edge, m] : info.edge_moderator) {
    if (make_triple_key(edge.first, edge.second, m) == key) {
      pair = edge;
      return true;
    }
  }
  return false;
}

void score_split(const SplitResult& split, const GeneratingModelInfo& info, int rep,
                 int n, std::vector<RecoveryRecord>& out) {
  int tp = 0;
  for (const auto& flag : split.flagged_edges) {
    const auto it = info.edge_moderator.find(make_pair_key(flag.i, flag.j));
    if (it == info.edge_moderator.end()) continue;
    const double truth = info.model.get_omega(flag.i, flag.j, it->second);
    if (truth != 0.0 && flag.direction_sign == sign_of(truth)) ++tp;
  }
  for (ParamType t : {ParamType::ModOfPartial, ParamType::ModFull}) {
    RecoveryRecord rec;
    rec.replication = rep;
    rec.n = n;
    rec.estimator = EstimatorKind::Split;
    rec.param_type = t;
    rec.est_threeway_total = static_cast<int>(split.flagged_edges.size());
    rec.true_positive_threeway = tp;
    for (const auto& key : info.true_threeway(t)) {
      ++rec.true_count;
      PairKey pair;
      if (!moderated_pair_of(info, key, pair)) continue;
      const double truth = info.model.get_omega(key[0], key[1], key[2]);
      for (const auto& flag : split.flagged_edges) {
        if (make_pair_key(flag.i, flag.j) == pair &&
            flag.direction_sign == sign_of(truth)) {
          ++rec.recovered_count;
          break;
        }
      }
    }
    out.push_back(rec);
  }
}

SimResult run_protocol(const SimConfig& cfg,
                       const std::function<GeneratingModelInfo(int)>& make_model,
                       const std::vector<EstimatorKind>& estimators) {
  cfg.validate();
  const int n_max = cfg.n_grid.back();
  std::vector<std::vector<RecoveryRecord>> per_rep(
      static_cast<std::size_t>(cfg.replications));
  std::vector<char> skipped(static_cast<std::size_t>(cfg.replications), 0);

  parallel_for(cfg.jobs, cfg.replications, [&](int rep) {
    const GeneratingModelInfo info = make_model(rep);
    SamplerConfig scfg;
    scfg.tau = cfg.tau;
    scfg.burn_in = cfg.burn_in;
    scfg.max_attempts_per_case = cfg.max_attempts_per_case;
    scfg.seed = derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(rep) + 1);
    SampleBatch batch;
    try {
      batch = gibbs_sample(info.model, n_max, scfg);
    } catch (const NumericError&) {
      skipped[static_cast<std::size_t>(rep)] = 1;
      return;
    }

    // nesting: each grid prefix is exactly the head of the next one
    for (std::size_t g = 0; g + 1 < cfg.n_grid.size(); ++g) {
      const auto h_small = prefix_hash(batch.data.topRows(cfg.n_grid[g]), cfg.n_grid[g]);
      const auto h_nested =
          prefix_hash(batch.data.topRows(cfg.n_grid[g + 1]), cfg.n_grid[g]);
      if (h_small != h_nested)
        throw NumericError("sample prefixes are not nested");
    }

    std::vector<std::string> names;
    for (int i = 1; i <= info.model.p; ++i) names.push_back("X" + std::to_string(i));
    const auto types = nonempty_types(info);
    auto& records = per_rep[static_cast<std::size_t>(rep)];

    for (int n : cfg.n_grid) {
      RawData data;
      data.values = batch.data.topRows(n);
      data.column_names = names;
      const StandardizedData std_data = standardize(data);

      bool have_mnm1 = false;
      std::size_t mnm1_begin = 0, mnm1_end = 0;
      for (EstimatorKind kind : estimators) {
        const std::size_t before = records.size();
        switch (kind) {
          case EstimatorKind::Mnm1: {
            const MnmModel m = fit_mnm(std_data, info.fit_moderators, cfg.rule,
                                       cfg.path, cfg.ebic, cfg.threshold, 1);
            score_model(m, info, types, rep, n, kind, records);
            mnm1_begin = before;
            mnm1_end = records.size();
            have_mnm1 = true;
            break;
          }
          case EstimatorKind::Mnm2: {
            const CombinedSequentialModel seq = fit_sequential(
                std_data, cfg.rule, cfg.path, cfg.ebic, cfg.threshold, 1);
            score_model(seq.union_model, info, types, rep, n, kind, records);
            // the union can only add pairwise detections over the informed fit
            if (have_mnm1) {
              for (std::size_t a = mnm1_begin, b = before; a < mnm1_end; ++a, ++b) {
                const bool pairwise = records[a].param_type == ParamType::PwUnmod ||
                                      records[a].param_type == ParamType::PwOfPartial;
                if (pairwise &&
                    records[b].recovered_count < records[a].recovered_count)
                  throw NumericError("sequential union lost a pairwise detection");
              }
            }
            break;
          }
          case EstimatorKind::Mnm3: {
            const MnmModel m = fit_mnm(std_data, ModeratorSet::all(info.model.p),
                                       cfg.rule, cfg.path, cfg.ebic, cfg.threshold, 1);
            score_model(m, info, types, rep, n, kind, records);
            break;
          }
          case EstimatorKind::Split: {
            if (info.moderator == 0)
              throw DataError("split baseline needs a single moderator");
            const SplitResult split = median_split_baseline(
                data, info.moderator, cfg.rule, cfg.path, cfg.ebic, cfg.threshold, 1);
            score_split(split, info, rep, n, records);
            break;
          }
        }
      }
    }
  });

  SimResult result;
  for (int rep = 0; rep < cfg.replications; ++rep) {
    if (skipped[static_cast<std::size_t>(rep)]) {
      result.skipped_replications.push_back(rep);
      continue;
    }
    auto& r = per_rep[static_cast<std::size_t>(rep)];
    result.records.insert(result.records.end(), r.begin(), r.end());
  }
  return result;
}

}  // namespace

SimResult run_simulation(const SimConfig& cfg) {
  return run_protocol(
      cfg,
      [&](int rep) {
        return random_mnm(derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(rep)));
      },
      cfg.estimators);
}

SimResult run_isolated_types(const SimConfig& cfg) {
  return run_protocol(
      cfg, [&](int) { return isolated_types_model(); },
      {EstimatorKind::Mnm1});
}

// Recovery is scored from the regression on node 1 alone: the experiment
// investigates how the EBIC-selected penalty of that regression reacts to
// additional uncorrelated true predictors, and joint-model AND aggregation
// would cap every curve at the neighbor-side regression's k-independent
// power, hiding exactly the effect under study.
std::map<int, SimResult> run_neighbors_experiment(const SimConfig& cfg) {
  cfg.validate();
  const int n_max = cfg.n_grid.back();
  std::map<int, SimResult> out;
  for (int k = 1; k <= 4; ++k) {
    const MnmModel truth = uncorrelated_neighbors_ggm(k);
    const std::uint64_t k_seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(k));
    std::vector<std::vector<RecoveryRecord>> per_rep(
        static_cast<std::size_t>(cfg.replications));
    std::vector<char> skipped(static_cast<std::size_t>(cfg.replications), 0);

    parallel_for(cfg.jobs, cfg.replications, [&](int rep) {
      SamplerConfig scfg;
      scfg.tau = cfg.tau;
      scfg.burn_in = cfg.burn_in;
      scfg.max_attempts_per_case = cfg.max_attempts_per_case;
      scfg.seed = derive_seed(k_seed, static_cast<std::uint64_t>(rep));
      SampleBatch batch;
      try {
        batch = gibbs_sample(truth, n_max, scfg);
      } catch (const NumericError&) {
        skipped[static_cast<std::size_t>(rep)] = 1;
        return;
      }
      for (int n : cfg.n_grid) {
        RawData data;
        data.values = batch.data.topRows(n);
        const StandardizedData std_data = standardize(data);
        const DesignMatrix X = build_design(std_data, 1, ModeratorSet::none());
        const auto fits = fit_path(X, std_data.values.col(0), cfg.path);
        const LassoFit& sel = select_lambda(fits, n, X.K(), cfg.ebic);
        const double cut = cfg.threshold.cutoff(truth.p, n);

        RecoveryRecord rec;
        rec.replication = rep;
        rec.n = n;
        rec.estimator = EstimatorKind::Mnm1;
        rec.param_type = ParamType::PwUnmod;
        rec.true_count = k;
        for (std::size_t c = 0; c < X.term_ids.size(); ++c) {
          if (X.term_ids[c].kind != TermKind::Main) continue;
          double v = sel.coefficients(static_cast<int>(c));
          if (std::abs(v) < cut) v = 0.0;
          if (v == 0.0) continue;
          ++rec.est_pairwise_total;
          const int j = X.term_ids[c].idx[0];
          if (truth.get_beta(1, j) != 0.0 && v > 0.0) {
            ++rec.true_positive_pairwise;
            ++rec.recovered_count;
          }
        }
        per_rep[static_cast<std::size_t>(rep)].push_back(rec);
      }
    });

    SimResult result;
    for (int rep = 0; rep < cfg.replications; ++rep) {
      if (skipped[static_cast<std::size_t>(rep)]) {
        result.skipped_replications.push_back(rep);
        continue;
      }
      auto& r = per_rep[static_cast<std::size_t>(rep)];
      result.records.insert(result.records.end(), r.begin(), r.end());
    }
    out[k] = std::move(result);
  }
  return out;
}

double sensitivity(const std::vector<RecoveryRecord>& records, EstimatorKind est,
                   const std::vector<ParamType>& types, int n) {
  long recovered = 0, truth = 0;
  for (const auto& r : records) {
    if (r.estimator != est || r.n != n) continue;
    if (std::find(types.begin(), types.end(), r.param_type) == types.end()) continue;
    recovered += r.recovered_count;
    truth += r.true_count;
  }
  if (truth == 0) throw DataError("sensitivity: no matching records");
  return static_cast<double>(recovered) / static_cast<double>(truth);
}

double sensitivity(const std::vector<RecoveryRecord>& records, EstimatorKind est,
                   ParamType type, int n) {
  return sensitivity(records, est, std::vector<ParamType>{type}, n);
}

std::optional<double> precision(const std::vector<RecoveryRecord>& records,
                                EstimatorKind est, ParamClass cls, int n,
                                int min_defined) {
  std::set<int> seen;
  double sum = 0.0;
  int defined = 0;
  for (const auto& r : records) {
    if (r.estimator != est || r.n != n) continue;
    if (!seen.insert(r.replication).second) continue;  // totals repeat per type row
    const int total =
        cls == ParamClass::Pairwise ? r.est_pairwise_total : r.est_threeway_total;
    const int tp = cls == ParamClass::Pairwise ? r.true_positive_pairwise
                                               : r.true_positive_threeway;
    if (total > 0) {
      sum += static_cast<double>(tp) / total;
      ++defined;
    }
  }
  if (defined < min_defined) return std::nullopt;
  return sum / defined;
}

SplitResult median_split_baseline(const RawData& data, int moderator,
                                  AggregationRule rule, const PathConfig& path_cfg,
                                  const EbicConfig& ebic_cfg,
                                  const ThresholdConfig& threshold, int jobs) {
  const int n = data.n(), p = data.p();
  if (n < 20) throw DataError("median split: need n >= 20");
  if (moderator < 1 || moderator > p)
    throw DataError("median split: moderator index out of range");

  std::vector<double> mod_values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) mod_values[static_cast<std::size_t>(i)] =
      data.values(i, moderator - 1);
  std::vector<double> sorted = mod_values;
  std::sort(sorted.begin(), sorted.end());
  const double median = n % 2 == 1
                            ? sorted[static_cast<std::size_t>(n / 2)]
                            : 0.5 * (sorted[static_cast<std::size_t>(n / 2 - 1)] +
                                     sorted[static_cast<std::size_t>(n / 2)]);

  std::vector<int> low_rows, high_rows;
  for (int i = 0; i < n; ++i)
    (mod_values[static_cast<std::size_t>(i)] <= median ? low_rows : high_rows)
        .push_back(i);
  if (static_cast<int>(low_rows.size()) < 10 || static_cast<int>(high_rows.size()) < 10)
    throw DataError("median split: a half has fewer than 10 rows (degenerate split)");

  auto subset = [&](const std::vector<int>& rows) {
    RawData out;
    out.values.resize(static_cast<int>(rows.size()), p);
    for (std::size_t r = 0; r < rows.size(); ++r)
      out.values.row(static_cast<int>(r)) = data.values.row(rows[r]);
    out.column_names = data.column_names;
    return out;
  };

  SplitResult result;
  result.n_low = static_cast<int>(low_rows.size());
  result.n_high = static_cast<int>(high_rows.size());
  result.low_model = fit_mnm(subset(low_rows), ModeratorSet::none(), rule, path_cfg,
                             ebic_cfg, threshold, jobs);
  result.high_model = fit_mnm(subset(high_rows), ModeratorSet::none(), rule, path_cfg,
                              ebic_cfg, threshold, jobs);

  for (int i = 1; i <= p; ++i) {
    for (int j = i + 1; j <= p; ++j) {
      const double lo = result.low_model.get_beta(i, j);
      const double hi = result.high_model.get_beta(i, j);
      const bool pattern_differs = (lo == 0.0) != (hi == 0.0);
      const bool sign_differs = lo != 0.0 && hi != 0.0 && sign_of(lo) != sign_of(hi);
      if (pattern_differs || sign_differs)
        result.flagged_edges.push_back({i, j, sign_of(hi - lo)});
    }
  }
  return result;
}

void write_records_csv(std::ostream& out, const std::vector<RecoveryRecord>& records) {
  out << "replication,n,estimator,metric,param,value\n";
  std::set<std::tuple<int, int, EstimatorKind>> totals_done;
  for (const auto& r : records) {
    const char* est = estimator_name(r.estimator);
    const char* type = param_type_name(r.param_type);
    out << r.replication << ',' << r.n << ',' << est << ",recovered," << type << ','
        << r.recovered_count << '\n';
    out << r.replication << ',' << r.n << ',' << est << ",true," << type << ','
        << r.true_count << '\n';
    if (totals_done.insert({r.replication, r.n, r.estimator}).second) {
      out << r.replication << ',' << r.n << ',' << est << ",est_total,pairwise,"
          << r.est_pairwise_total << '\n';
      out << r.replication << ',' << r.n << ',' << est << ",true_positive,pairwise,"
          << r.true_positive_pairwise << '\n';
      out << r.replication << ',' << r.n << ',' << est << ",est_total,threeway,"
          << r.est_threeway_total << '\n';
      out << r.replication << ',' << r.n << ',' << est << ",true_positive,threeway,"
          << r.true_positive_threeway << '\n';
    }
  }
}

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string summary_tables(const SimResult& result, const SimConfig& cfg) {
  std::ostringstream out;
  const auto& records = result.records;

  std::set<EstimatorKind> present;
  std::set<ParamType> types_present;
  for (const auto& r : records) {
    present.insert(r.estimator);
    types_present.insert(r.param_type);
  }
  auto display = [](EstimatorKind k) {
    switch (k) {
      case EstimatorKind::Mnm1: return "MNM (1)";
      case EstimatorKind::Mnm2: return "MNM (2)";
      case EstimatorKind::Mnm3: return "MNM (3)";
      case EstimatorKind::Split: return "SPLIT  ";
    }
    return "?";
  };

  for (ParamType type : {ParamType::PwUnmod, ParamType::PwOfPartial,
                         ParamType::ModOfPartial, ParamType::ModFull}) {
    if (!types_present.count(type)) continue;
    const ParamClass cls = (type == ParamType::PwUnmod || type == ParamType::PwOfPartial)
                               ? ParamClass::Pairwise
                               : ParamClass::Threeway;
    out << "== " << param_type_name(type) << " ==\n";
    out << "            ";
    for (int n : cfg.n_grid) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%7d", n);
      out << buf;
    }
    out << '\n';
    for (EstimatorKind est : {EstimatorKind::Mnm1, EstimatorKind::Mnm2,
                              EstimatorKind::Mnm3, EstimatorKind::Split}) {
      if (!present.count(est)) continue;
      bool has_rows = false;
      for (const auto& r : records)
        if (r.estimator == est && r.param_type == type) { has_rows = true; break; }
      if (!has_rows) continue;
      out << display(est) << " SE  ";
      for (int n : cfg.n_grid) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%7s",
                      fixed3(sensitivity(records, est, type, n)).c_str());
        out << buf;
      }
      out << '\n';
    }
    for (EstimatorKind est : {EstimatorKind::Mnm1, EstimatorKind::Mnm2,
                              EstimatorKind::Mnm3, EstimatorKind::Split}) {
      if (!present.count(est)) continue;
      if (est == EstimatorKind::Split && cls == ParamClass::Pairwise) continue;
      bool has_rows = false;
      for (const auto& r : records)
        if (r.estimator == est && r.param_type == type) { has_rows = true; break; }
      if (!has_rows) continue;
      out << display(est) << " PR  ";
      for (int n : cfg.n_grid) {
        const auto pr = precision(records, est, cls, n);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%7s", pr ? fixed3(*pr).c_str() : "");
        out << buf;
      }
      out << '\n';
    }
    out << '\n';
  }
  if (!result.skipped_replications.empty()) {
    out << "skipped replications (sampler abort):";
    for (int rep : result.skipped_replications) out << ' ' << rep;
    out << '\n';
  }
  return out.str();
}

}  // namespace modnet
