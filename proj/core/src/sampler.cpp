#include "modnet/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "modnet/estimator.hpp"
#include "modnet/parallel.hpp"
#include "modnet/rng.hpp"

namespace modnet {

double conditional_mean(const MnmModel& model, int s, const Eigen::VectorXd& x) {
  model.check_index(s);
  if (static_cast<int>(x.size()) != model.p)
    throw DataError("conditional_mean: state vector has wrong length");
  double mu = model.alpha(s - 1);
  for (const auto& [key, v] : model.beta) {
    if (key.first == s) mu += v * x(key.second - 1);
    else if (key.second == s) mu += v * x(key.first - 1);
  }
  for (const auto& [key, v] : model.omega) {
    if (key[0] == s) mu += v * x(key[1] - 1) * x(key[2] - 1);
    else if (key[1] == s) mu += v * x(key[0] - 1) * x(key[2] - 1);
    else if (key[2] == s) mu += v * x(key[0] - 1) * x(key[1] - 1);
  }
  return mu;
}

namespace {

// Per-node term lists compiled from the sparse maps, in map iteration order,
// so sweeps cost O(nnz) instead of scanning the maps p times.
struct CompiledModel {
  int p;
  Eigen::VectorXd alpha, sigma;
  struct PairTerm { int other; double w; };
  struct TripleTerm { int a, b; double w; };
  std::vector<std::vector<PairTerm>> pair_terms;
  std::vector<std::vector<TripleTerm>> triple_terms;

  explicit CompiledModel(const MnmModel& m)
      : p(m.p), alpha(m.alpha), sigma(m.sigma),
        pair_terms(static_cast<std::size_t>(m.p)),
        triple_terms(static_cast<std::size_t>(m.p)) {
    for (const auto& [key, v] : m.beta) {
      pair_terms[static_cast<std::size_t>(key.first - 1)].push_back({key.second, v});
      pair_terms[static_cast<std::size_t>(key.second - 1)].push_back({key.first, v});
    }
    for (const auto& [key, v] : m.omega) {
      triple_terms[static_cast<std::size_t>(key[0] - 1)].push_back({key[1], key[2], v});
      triple_terms[static_cast<std::size_t>(key[1] - 1)].push_back({key[0], key[2], v});
      triple_terms[static_cast<std::size_t>(key[2] - 1)].push_back({key[0], key[1], v});
    }
  }

  double mu(int s, const Eigen::VectorXd& x) const {
    double out = alpha(s - 1);
    for (const auto& t : pair_terms[static_cast<std::size_t>(s - 1)])
      out += t.w * x(t.other - 1);
    for (const auto& t : triple_terms[static_cast<std::size_t>(s - 1)])
      out += t.w * x(t.a - 1) * x(t.b - 1);
    return out;
  }
};

// Draws one accepted case; returns the number of rejected chains on the way.
// Throws NumericError when the attempt budget is exhausted.
long sample_case(const CompiledModel& model, const SamplerConfig& cfg,
                 Xoshiro256pp& rng, Eigen::VectorXd& x) {
  for (int attempt = 0; attempt < cfg.max_attempts_per_case; ++attempt) {
    for (int j = 0; j < model.p; ++j) x(j) = rng.next_normal();
    for (int sweep = 0; sweep < cfg.burn_in; ++sweep)
      for (int s = 1; s <= model.p; ++s)
        x(s - 1) = model.mu(s, x) + model.sigma(s - 1) * rng.next_normal();
    bool inside = true;
    for (int j = 0; j < model.p; ++j) {
      if (!(std::abs(x(j)) <= cfg.tau)) {  // also catches NaN/inf
        inside = false;
        break;
      }
    }
    if (inside) return attempt;
  }
  throw NumericError("gibbs_sample: a chain exceeded " +
                     std::to_string(cfg.max_attempts_per_case) +
                     " attempts; the model is likely not normalizable in practice");
}

}  // namespace

SampleBatch gibbs_sample(const MnmModel& model, int n_cases, const SamplerConfig& cfg) {
  if (n_cases < 0) throw std::invalid_argument("gibbs_sample: negative n_cases");
  if (!(cfg.tau > 0.0) || cfg.burn_in < 1)
    throw std::invalid_argument("gibbs_sample: invalid sampler config");
  const CompiledModel compiled(model);

  SampleBatch batch;
  batch.data.resize(n_cases, model.p);
  std::atomic<long> rejected{0};
  // Substream per case index, so results do not depend on scheduling.
  parallel_for(cfg.jobs, n_cases, [&](int i) {
    Xoshiro256pp rng(cfg.seed ^ static_cast<std::uint64_t>(i));
    Eigen::VectorXd x(model.p);
    rejected += sample_case(compiled, cfg, rng, x);
    batch.data.row(i) = x.transpose();
  });
  batch.rejected_chains = rejected.load();
  batch.attempted_chains = batch.rejected_chains + n_cases;
  batch.rejection_rate =
      batch.attempted_chains == 0
          ? 0.0
          : static_cast<double>(batch.rejected_chains) / batch.attempted_chains;
  return batch;
}

std::vector<ScreenEntry> screen_models(const std::vector<MnmModel>& candidates,
                                       int n_probe, const SamplerConfig& cfg,
                                       double keep_ratio) {
  if (candidates.empty()) throw DataError("screen_models: no candidates");
  std::vector<ScreenEntry> entries(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    entries[c].index = c;
    // common random numbers: every candidate sees the same probe stream, so
    // identical candidates tie exactly and comparisons are paired
    try {
      entries[c].rejection_rate =
          gibbs_sample(candidates[c], n_probe, cfg).rejection_rate;
    } catch (const NumericError&) {
      entries[c].rejection_rate = 1.0;
      entries[c].aborted = true;
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ScreenEntry& a, const ScreenEntry& b) {
                     return a.rejection_rate < b.rejection_rate;
                   });
  const auto keep = static_cast<std::size_t>(
      std::ceil(keep_ratio * static_cast<double>(candidates.size())));
  entries.resize(std::min(entries.size(), std::max<std::size_t>(keep, 1)));
  return entries;
}

NodewiseOls ols_nodewise(const StandardizedData& data, const ModeratorSet& mods) {
  NodewiseOls out;
  const int p = data.p();
  for (int s = 1; s <= p; ++s) {
    const DesignMatrix X = build_design(data, s, mods);
    const Eigen::VectorXd y = data.values.col(s - 1);
    const auto qr = X.columns.colPivHouseholderQr();
    if (qr.rank() < X.K())
      throw NumericError("ols_nodewise: singular design for node " + std::to_string(s));
    const Eigen::VectorXd b_internal = qr.solve(y);
    for (std::size_t k = 0; k < X.term_ids.size(); ++k) {
      const TermId& id = X.term_ids[k];
      const double coef = b_internal(static_cast<int>(k)) / X.col_sds(static_cast<int>(k));
      if (id.kind == TermKind::Main)
        out.pairwise[make_pair_key(s, id.idx[0])].push_back(coef);
      else
        out.threeway[make_triple_key(id.idx[0], id.idx[1], id.idx[2])].push_back(coef);
    }
  }
  return out;
}

BiasCheckResult bias_check(const GeneratingModelInfo& info, int n,
                           const SamplerConfig& cfg) {
  const SampleBatch batch = gibbs_sample(info.model, n, cfg);
  RawData raw;
  raw.values = batch.data;
  const NodewiseOls ols = ols_nodewise(standardize(raw), info.fit_moderators);

  BiasCheckResult result;
  result.n = n;
  result.rejection_rate = batch.rejection_rate;

  double pw_sum = 0.0; long pw_count = 0;
  for (const auto& [key, values] : ols.pairwise)
    for (double v : values) { pw_sum += v; ++pw_count; }
  double tw_sum = 0.0; long tw_count = 0;
  for (const auto& [key, values] : ols.threeway)
    for (double v : values) { tw_sum += v; ++tw_count; }
  result.mean_all_pairwise = pw_count ? pw_sum / pw_count : 0.0;
  result.mean_all_threeway = tw_count ? tw_sum / tw_count : 0.0;

  for (ParamType t : {ParamType::PwUnmod, ParamType::PwOfPartial}) {
    double sum = 0.0; long count = 0;
    for (const auto& key : info.true_pairwise(t))
      for (double v : ols.pairwise.at(key)) { sum += v; ++count; }
    if (count) result.per_type_mean[t] = sum / count;
  }
  for (ParamType t : {ParamType::ModOfPartial, ParamType::ModFull}) {
    double sum = 0.0; long count = 0;
    for (const auto& key : info.true_threeway(t))
      for (double v : ols.threeway.at(key)) { sum += v; ++count; }
    if (count) result.per_type_mean[t] = sum / count;
  }
  return result;
}

}  // namespace modnet
