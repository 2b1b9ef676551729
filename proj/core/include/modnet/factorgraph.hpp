#pragma once

#include <string>
#include <vector>

#include "modnet/estimator.hpp"
#include "modnet/types.hpp"

namespace modnet {

struct FactorNode {
  int order{2};       // 2 or 3
  TermId members;     // Pairwise or ThreeWay id
  double weight{0.0};
  int sign{1};
  friend bool operator==(const FactorNode&, const FactorNode&) = default;
};

struct FactorEdge {
  int factor{0};      // index into factor_nodes
  int variable{0};    // 1-based
  double weight{0.0};
  bool directed{false};  // true: edge points toward the response variable
  friend bool operator==(const FactorEdge&, const FactorEdge&) = default;
};

// Direct variable-variable edge used when pairwise factors are collapsed.
struct PairwiseEdge {
  int i{0}, j{0};
  double weight{0.0};
  int sign{1};
  friend bool operator==(const PairwiseEdge&, const PairwiseEdge&) = default;
};

// Factor-graph view of a model: one factor node per nonzero interaction,
// connected to the variables it involves. In nodewise mode the edges are
// directed toward the response node of the regression that produced each
// estimate and carry the unaggregated estimates.
struct FactorGraph {
  std::vector<std::string> variable_nodes;
  std::vector<FactorNode> factor_nodes;
  std::vector<FactorEdge> edges;
  std::vector<PairwiseEdge> pairwise_edges;
  bool pairwise_as_edge{false};
  bool nodewise{false};

  int p() const { return static_cast<int>(variable_nodes.size()); }
  friend bool operator==(const FactorGraph&, const FactorGraph&) = default;
};

FactorGraph to_factor_graph(const MnmModel& model, bool pairwise_as_edge = false,
                            std::vector<std::string> names = {});

FactorGraph to_nodewise_factor_graph(const std::vector<NodewiseFit>& fits,
                                     std::vector<std::string> names = {});

// Graphviz text: variables as circles, factors as squares labeled with their
// order, penwidth 1 + 4*|w|/max|w|, green for positive and red for negative
// weights. Deterministic: variables ascending, factors by canonical key.
std::string export_dot(const FactorGraph& graph);

// Lossless structure dump; factor_graph_from_json inverts it exactly.
std::string export_json(const FactorGraph& graph);
FactorGraph factor_graph_from_json(const std::string& text);

}  // namespace modnet
