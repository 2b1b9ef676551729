#include "modnet/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "modnet/parallel.hpp"

namespace modnet {

DesignMatrix build_design(const StandardizedData& data, int s, const ModeratorSet& mods) {
  const int n = data.n(), p = data.p();
  if (s < 1 || s > p)
    throw DataError("node index out of range: " + std::to_string(s));

  std::vector<TermId> ids;
  for (int j = 1; j <= p; ++j)
    if (j != s) ids.push_back(TermId::main(j));
  const std::size_t n_main = ids.size();
  for (int i = 1; i <= p; ++i) {
    if (i == s) continue;
    for (int j = i + 1; j <= p; ++j) {
      if (j == s) continue;
      if (!mods.admits(i, j, s)) continue;
      const auto key = make_triple_key(i, j, s);
      ids.push_back(TermId::threeway(key[0], key[1], key[2]));
    }
  }

  Eigen::MatrixXd cols(n, static_cast<int>(ids.size()));
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const TermId& id = ids[k];
    if (k < n_main) {
      cols.col(static_cast<int>(k)) = data.values.col(id.idx[0] - 1);
    } else {
      // product of the two members that are not s
      int a = 0, b = 0;
      for (int m : id.idx) {
        if (m == s) continue;
        if (a == 0) a = m; else b = m;
      }
      cols.col(static_cast<int>(k)) =
          data.values.col(a - 1).cwiseProduct(data.values.col(b - 1));
    }
  }
  return make_design(std::move(cols), std::move(ids));
}

double ThresholdConfig::cutoff(int p, int n) const {
  switch (rule) {
    case ThresholdRule::None: return 0.0;
    case ThresholdRule::SqrtLogPOverN:
      return std::sqrt(std::log(static_cast<double>(p)) / n);
  }
  return 0.0;
}

namespace {

NodewiseFit fit_one_node(const StandardizedData& data, int s, const ModeratorSet& mods,
                         const PathConfig& path_cfg, const EbicConfig& ebic_cfg,
                         const ThresholdConfig& threshold) {
  DesignMatrix X = build_design(data, s, mods);
  const Eigen::VectorXd y = data.values.col(s - 1);
  const int n = data.n(), K = X.K();

  auto fits = fit_path(X, y, path_cfg);
  NodewiseFit out;
  out.node = s;
  const std::size_t sel = select_lambda_index(fits, n, K, ebic_cfg, &out.ebic_trace);
  out.lambda_grid.reserve(fits.size());
  for (const auto& f : fits) out.lambda_grid.push_back(f.lambda);
  out.selected = fits[sel];
  out.term_ids = X.term_ids;

  if (!out.selected.converged)
    throw NumericError("nodewise regression on node " + std::to_string(s) +
                       " did not converge within max_iter");
  const auto kkt = kkt_check(X, y, out.selected);
  if (!kkt.ok(1e-4))
    throw NumericError("KKT violation at selected fit for node " + std::to_string(s) +
                       " (zero " + std::to_string(kkt.max_violation_zero) + ", active " +
                       std::to_string(kkt.max_violation_active) + ")");

  const int dof = std::max(n - out.selected.df - 1, 1);
  out.sigma_resid = std::sqrt(out.selected.rss / dof);

  out.coefficients = out.selected.coefficients;
  const double cut = threshold.cutoff(data.p(), n);
  if (cut > 0.0)
    for (int k = 0; k < out.coefficients.size(); ++k)
      if (std::abs(out.coefficients(k)) < cut) out.coefficients(k) = 0.0;
  return out;
}

struct Gathered {
  double sum{0.0};
  int count{0};
  int nonzero{0};
};

}  // namespace

std::vector<NodewiseFit> fit_nodewise(const StandardizedData& data,
                                      const ModeratorSet& mods,
                                      const PathConfig& path_cfg,
                                      const EbicConfig& ebic_cfg,
                                      const ThresholdConfig& threshold, int jobs) {
  const int p = data.p();
  std::vector<NodewiseFit> fits(static_cast<std::size_t>(p));
  parallel_for(jobs, p, [&](int i) {
    fits[static_cast<std::size_t>(i)] =
        fit_one_node(data, i + 1, mods, path_cfg, ebic_cfg, threshold);
  });
  return fits;
}

MnmModel aggregate(const std::vector<NodewiseFit>& fits, AggregationRule rule) {
  const int p = static_cast<int>(fits.size());
  if (p == 0) throw DataError("aggregate: no nodewise fits");
  std::vector<bool> seen(static_cast<std::size_t>(p) + 1, false);
  for (const auto& f : fits) {
    if (f.node < 1 || f.node > p || seen[static_cast<std::size_t>(f.node)])
      throw DataError("aggregate: fits must cover each node 1..p exactly once");
    seen[static_cast<std::size_t>(f.node)] = true;
  }

  std::map<PairKey, Gathered> pair_est;
  std::map<TripleKey, Gathered> triple_est;
  for (const auto& f : fits) {
    for (std::size_t k = 0; k < f.term_ids.size(); ++k) {
      const TermId& id = f.term_ids[k];
      const double v = f.coefficients(static_cast<int>(k));
      Gathered* g = nullptr;
      if (id.kind == TermKind::Main) {
        g = &pair_est[make_pair_key(f.node, id.idx[0])];
      } else if (id.kind == TermKind::ThreeWay) {
        g = &triple_est[make_triple_key(id.idx[0], id.idx[1], id.idx[2])];
      } else {
        throw DataError("aggregate: unexpected pairwise term id in nodewise fit");
      }
      g->sum += v;
      g->count += 1;
      if (v != 0.0) g->nonzero += 1;
    }
  }

  MnmModel model = MnmModel::empty(p);
  auto combined = [&](const Gathered& g, int expected) {
    if (g.count != expected)
      throw DataError("aggregate: expected " + std::to_string(expected) +
                      " nodewise estimates, gathered " + std::to_string(g.count));
    if (g.nonzero == 0) return 0.0;
    if (rule == AggregationRule::And && g.nonzero != expected) return 0.0;
    return g.sum / g.count;
  };
  for (const auto& [key, g] : pair_est)
    model.set_beta(key.first, key.second, combined(g, 2));
  for (const auto& [key, g] : triple_est)
    model.set_omega(key[0], key[1], key[2], combined(g, 3));
  for (const auto& f : fits) model.sigma(f.node - 1) = f.sigma_resid;
  return model;
}

MnmModel fit_mnm(const StandardizedData& data, const ModeratorSet& mods,
                 AggregationRule rule, const PathConfig& path_cfg,
                 const EbicConfig& ebic_cfg, const ThresholdConfig& threshold,
                 int jobs) {
  return aggregate(fit_nodewise(data, mods, path_cfg, ebic_cfg, threshold, jobs), rule);
}

MnmModel fit_mnm(const RawData& data, const ModeratorSet& mods, AggregationRule rule,
                 const PathConfig& path_cfg, const EbicConfig& ebic_cfg,
                 const ThresholdConfig& threshold, int jobs) {
  return fit_mnm(standardize(data), mods, rule, path_cfg, ebic_cfg, threshold, jobs);
}

namespace {

// Union value: mean over the models where the parameter is nonzero; on sign
// disagreement, the value of largest absolute magnitude wins.
double union_value(const std::vector<double>& nonzero_values) {
  if (nonzero_values.empty()) return 0.0;
  bool pos = false, neg = false;
  for (double v : nonzero_values) (v > 0 ? pos : neg) = true;
  if (pos && neg) {
    double best = 0.0;
    for (double v : nonzero_values)
      if (std::abs(v) > std::abs(best)) best = v;
    return best;
  }
  double sum = 0.0;
  for (double v : nonzero_values) sum += v;
  return sum / static_cast<double>(nonzero_values.size());
}

}  // namespace

MnmModel sequential_union(const std::vector<MnmModel>& models) {
  if (models.empty()) throw DataError("sequential_union: no models");
  const int p = models.front().p;
  for (const auto& m : models)
    if (m.p != p) throw DataError("sequential_union: mismatched model sizes");
  MnmModel out = MnmModel::empty(p);

  std::map<PairKey, std::vector<double>> pair_values;
  std::map<TripleKey, std::vector<double>> triple_values;
  Eigen::VectorXd sigma_sum = Eigen::VectorXd::Zero(p);
  for (const auto& m : models) {
    for (const auto& [key, v] : m.beta) pair_values[key].push_back(v);
    for (const auto& [key, v] : m.omega) triple_values[key].push_back(v);
    sigma_sum += m.sigma;
  }
  for (const auto& [key, values] : pair_values)
    out.set_beta(key.first, key.second, union_value(values));
  for (const auto& [key, values] : triple_values)
    out.set_omega(key[0], key[1], key[2], union_value(values));
  out.sigma = sigma_sum / static_cast<double>(models.size());
  return out;
}

CombinedSequentialModel fit_sequential(const StandardizedData& data,
                                       AggregationRule rule, const PathConfig& path_cfg,
                                       const EbicConfig& ebic_cfg,
                                       const ThresholdConfig& threshold, int jobs) {
  const int p = data.p();
  std::vector<MnmModel> models(static_cast<std::size_t>(p));
  parallel_for(jobs, p, [&](int i) {
    models[static_cast<std::size_t>(i)] = fit_mnm(data, ModeratorSet::of({i + 1}, p),
                                                  rule, path_cfg, ebic_cfg, threshold, 1);
  });
  CombinedSequentialModel out;
  out.union_model = sequential_union(models);
  out.per_moderator_models = std::move(models);
  return out;
}

CombinedSequentialModel fit_sequential(const RawData& data, AggregationRule rule,
                                       const PathConfig& path_cfg,
                                       const EbicConfig& ebic_cfg,
                                       const ThresholdConfig& threshold, int jobs) {
  return fit_sequential(standardize(data), rule, path_cfg, ebic_cfg, threshold, jobs);
}

InteractionInfo show_interaction(const MnmModel& model, const std::vector<int>& indices) {
  double w = 0.0;
  if (indices.size() == 2) {
    w = model.get_beta(indices[0], indices[1]);
  } else if (indices.size() == 3) {
    w = model.get_omega(indices[0], indices[1], indices[2]);
  } else {
    throw DataError("show_interaction: need 2 or 3 indices");
  }
  InteractionInfo info;
  info.weight = w;
  info.sign = w > 0.0 ? 1 : (w < 0.0 ? -1 : 0);
  return info;
}

}  // namespace modnet
