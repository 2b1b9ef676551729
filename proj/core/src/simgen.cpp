#include "modnet/simgen.hpp"

#include <algorithm>

#include "modnet/rng.hpp"

namespace modnet {

std::vector<PairKey> GeneratingModelInfo::true_pairwise(ParamType t) const {
  std::vector<PairKey> out;
  for (const auto& [key, type] : edge_types) {
    if (t == ParamType::PwUnmod && type == EdgeType::Unmoderated) out.push_back(key);
    if (t == ParamType::PwOfPartial && type == EdgeType::PartiallyModerated)
      out.push_back(key);
  }
  return out;
}

std::vector<TripleKey> GeneratingModelInfo::true_threeway(ParamType t) const {
  std::vector<TripleKey> out;
  for (const auto& [key, type] : edge_types) {
    const bool want = (t == ParamType::ModOfPartial && type == EdgeType::PartiallyModerated) ||
                      (t == ParamType::ModFull && type == EdgeType::FullyModerated);
    if (!want) continue;
    out.push_back(make_triple_key(key.first, key.second, edge_moderator.at(key)));
  }
  return out;
}

GeneratingModelInfo random_mnm(std::uint64_t seed) {
  constexpr int kBaseNodes = 12;
  constexpr int kEdges = 6;
  constexpr int kModerator = 13;
  constexpr double kWeight = 0.2;
  constexpr long kResampleBudget = 1000000;

  Xoshiro256pp rng(seed);
  std::vector<PairKey> all_pairs;
  for (int i = 1; i <= kBaseNodes; ++i)
    for (int j = i + 1; j <= kBaseNodes; ++j) all_pairs.emplace_back(i, j);

  std::vector<PairKey> edges;
  for (long attempt = 0;; ++attempt) {
    if (attempt >= kResampleBudget)
      throw NumericError("random_mnm: resampling budget exhausted");
    edges.clear();
    while (static_cast<int>(edges.size()) < kEdges) {
      const auto e = all_pairs[rng.next_below(all_pairs.size())];
      if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
    }
    int degree[kBaseNodes + 1] = {};
    bool ok = true;
    for (const auto& [i, j] : edges) {
      if (++degree[i] > 2 || ++degree[j] > 2) { ok = false; break; }
    }
    if (ok) break;
  }

  // seeded Fisher-Yates, then positional role assignment 2/2/2
  for (int i = kEdges - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(edges[static_cast<std::size_t>(i)], edges[static_cast<std::size_t>(j)]);
  }

  GeneratingModelInfo info;
  info.moderator = kModerator;
  info.fit_moderators = ModeratorSet::of({kModerator}, kModerator);
  info.model = MnmModel::empty(kModerator);
  for (int e = 0; e < kEdges; ++e) {
    const auto& [i, j] = edges[static_cast<std::size_t>(e)];
    const EdgeType type = e < 2   ? EdgeType::Unmoderated
                          : e < 4 ? EdgeType::PartiallyModerated
                                  : EdgeType::FullyModerated;
    info.edge_types[{i, j}] = type;
    if (type != EdgeType::FullyModerated) info.model.set_beta(i, j, kWeight);
    if (type != EdgeType::Unmoderated) {
      info.model.set_omega(i, j, kModerator, kWeight);
      info.edge_moderator[{i, j}] = kModerator;
    }
  }
  return info;
}

GeneratingModelInfo isolated_types_model() {
  constexpr double kWeight = 0.2;
  GeneratingModelInfo info;
  info.model = MnmModel::empty(8);
  info.model.set_beta(7, 8, kWeight);
  info.model.set_omega(1, 2, 3, kWeight);
  info.model.set_beta(5, 6, kWeight);
  info.model.set_omega(4, 5, 6, kWeight);

  info.edge_types[{7, 8}] = EdgeType::Unmoderated;
  info.edge_types[{2, 3}] = EdgeType::FullyModerated;
  info.edge_moderator[{2, 3}] = 1;
  info.edge_types[{5, 6}] = EdgeType::PartiallyModerated;
  info.edge_moderator[{5, 6}] = 4;
  info.moderator = 0;  // two moderator roles (1 and 4)
  info.fit_moderators = ModeratorSet::of({1, 4}, 8);
  return info;
}

MnmModel uncorrelated_neighbors_ggm(int k) {
  if (k < 1 || k > 4)
    throw DataError("uncorrelated_neighbors_ggm: k must be in 1..4");
  MnmModel m = MnmModel::empty(20);
  for (int j = 2; j <= k + 1; ++j) m.set_beta(1, j, 0.2);
  return m;
}

}  // namespace modnet
