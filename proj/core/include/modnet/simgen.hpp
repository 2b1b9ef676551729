#pragma once

#include <cstdint>
#include <map>

#include "modnet/types.hpp"

namespace modnet {

enum class EdgeType { Unmoderated, PartiallyModerated, FullyModerated };

// The four true-parameter classes tracked in the recovery experiments.
enum class ParamType { PwUnmod, PwOfPartial, ModOfPartial, ModFull };

// A data-generating model plus the bookkeeping the recovery metrics need:
// which pairwise slot has which role and who moderates it.
struct GeneratingModelInfo {
  MnmModel model;
  std::map<PairKey, EdgeType> edge_types;
  std::map<PairKey, int> edge_moderator;  // moderated edges -> moderator node
  int moderator{0};                       // 0 when roles are mixed
  ModeratorSet fit_moderators;            // what an informed fit specifies

  // True parameter keys per class.
  std::vector<PairKey> true_pairwise(ParamType t) const;
  std::vector<TripleKey> true_threeway(ParamType t) const;
};

// Random 13-node generating model: 6 distinct edges among nodes 1..12 drawn
// uniformly, whole graph resampled until every node has degree <= 2; edge
// roles assigned 2/2/2 by a seeded shuffle; node 13 moderates and carries no
// pairwise edge; every nonzero beta and omega equals 0.2, alpha 0, sigma 1.
GeneratingModelInfo random_mnm(std::uint64_t seed);

// Fixed 8-node model isolating the four parameter types: beta_78 = 0.2
// unmoderated; omega_123 = 0.2 with no pairwise among 1,2,3 (pair 2-3 fully
// moderated by 1); beta_56 = 0.2 with omega_456 = 0.2 (pair 5-6 partially
// moderated by 4).
GeneratingModelInfo isolated_types_model();

// 20-node GGM with k in 1..4 edges from node 1 to otherwise unconnected
// neighbors 2..k+1, all with weight 0.2.
MnmModel uncorrelated_neighbors_ggm(int k);

}  // namespace modnet
