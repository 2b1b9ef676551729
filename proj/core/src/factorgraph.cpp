#include "modnet/factorgraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace modnet {

namespace {

std::vector<std::string> default_names(int p, std::vector<std::string> names) {
  if (!names.empty()) {
    if (static_cast<int>(names.size()) != p)
      throw DataError("factor graph: label count does not match p");
    return names;
  }
  names.reserve(static_cast<std::size_t>(p));
  for (int i = 1; i <= p; ++i) names.push_back("X" + std::to_string(i));
  return names;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

FactorGraph to_factor_graph(const MnmModel& model, bool pairwise_as_edge,
                            std::vector<std::string> names) {
  FactorGraph g;
  g.variable_nodes = default_names(model.p, std::move(names));
  g.pairwise_as_edge = pairwise_as_edge;

  for (const auto& [key, v] : model.beta) {
    if (v == 0.0) continue;
    if (pairwise_as_edge) {
      g.pairwise_edges.push_back({key.first, key.second, v, sign_of(v)});
    } else {
      const int f = static_cast<int>(g.factor_nodes.size());
      g.factor_nodes.push_back({2, TermId::pairwise(key.first, key.second), v, sign_of(v)});
      g.edges.push_back({f, key.first, v, false});
      g.edges.push_back({f, key.second, v, false});
    }
  }
  for (const auto& [key, v] : model.omega) {
    if (v == 0.0) continue;
    const int f = static_cast<int>(g.factor_nodes.size());
    g.factor_nodes.push_back({3, TermId::threeway(key[0], key[1], key[2]), v, sign_of(v)});
    for (int m : key) g.edges.push_back({f, m, v, false});
  }
  return g;
}

FactorGraph to_nodewise_factor_graph(const std::vector<NodewiseFit>& fits,
                                     std::vector<std::string> names) {
  const int p = static_cast<int>(fits.size());
  if (p == 0) throw DataError("nodewise factor graph: no fits");

  // response node -> estimate, gathered per parameter
  std::map<PairKey, std::map<int, double>> pair_est;
  std::map<TripleKey, std::map<int, double>> triple_est;
  for (const auto& f : fits) {
    for (std::size_t k = 0; k < f.term_ids.size(); ++k) {
      const double v = f.coefficients(static_cast<int>(k));
      if (v == 0.0) continue;  // zero estimates leave no directed edge
      const TermId& id = f.term_ids[k];
      if (id.kind == TermKind::Main)
        pair_est[make_pair_key(f.node, id.idx[0])][f.node] = v;
      else
        triple_est[make_triple_key(id.idx[0], id.idx[1], id.idx[2])][f.node] = v;
    }
  }

  FactorGraph g;
  g.variable_nodes = default_names(p, std::move(names));
  g.nodewise = true;
  auto mean_of = [](const std::map<int, double>& m) {
    double s = 0.0;
    for (const auto& [node, v] : m) s += v;
    return s / static_cast<double>(m.size());
  };
  for (const auto& [key, by_node] : pair_est) {
    const double w = mean_of(by_node);
    const int f = static_cast<int>(g.factor_nodes.size());
    g.factor_nodes.push_back({2, TermId::pairwise(key.first, key.second), w, sign_of(w)});
    for (const auto& [node, v] : by_node) g.edges.push_back({f, node, v, true});
  }
  for (const auto& [key, by_node] : triple_est) {
    const double w = mean_of(by_node);
    const int f = static_cast<int>(g.factor_nodes.size());
    g.factor_nodes.push_back({3, TermId::threeway(key[0], key[1], key[2]), w, sign_of(w)});
    for (const auto& [node, v] : by_node) g.edges.push_back({f, node, v, true});
  }
  return g;
}

namespace {

std::string dot_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string export_dot(const FactorGraph& graph) {
  double max_abs = 0.0;
  for (const auto& e : graph.edges) max_abs = std::max(max_abs, std::abs(e.weight));
  for (const auto& e : graph.pairwise_edges)
    max_abs = std::max(max_abs, std::abs(e.weight));
  auto penwidth = [&](double w) {
    return max_abs > 0.0 ? 1.0 + 4.0 * std::abs(w) / max_abs : 1.0;
  };
  const char* connector = graph.nodewise ? " -> " : " -- ";

  std::ostringstream out;
  out << (graph.nodewise ? "digraph" : "graph") << " factorgraph {\n";
  for (int i = 1; i <= graph.p(); ++i)
    out << "  v" << i << " [shape=circle, label=\""
        << graph.variable_nodes[static_cast<std::size_t>(i - 1)] << "\"];\n";
  for (std::size_t f = 0; f < graph.factor_nodes.size(); ++f)
    out << "  f" << f << " [shape=square, label=\"" << graph.factor_nodes[f].order
        << "\"];\n";
  for (const auto& e : graph.edges)
    out << "  f" << e.factor << connector << "v" << e.variable << " [penwidth="
        << dot_number(penwidth(e.weight)) << ", color="
        << (e.weight >= 0.0 ? "green" : "red") << "];\n";
  for (const auto& e : graph.pairwise_edges)
    out << "  v" << e.i << connector << "v" << e.j << " [penwidth="
        << dot_number(penwidth(e.weight)) << ", color="
        << (e.sign >= 0 ? "green" : "red") << "];\n";
  out << "}\n";
  return out.str();
}

namespace {

nlohmann::ordered_json term_to_json(const TermId& id) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (int i = 0; i < id.order(); ++i) j.push_back(id.idx[i]);
  return j;
}

TermId term_from_members(const std::vector<int>& members) {
  if (members.size() == 2) return TermId::pairwise(members[0], members[1]);
  if (members.size() == 3) return TermId::threeway(members[0], members[1], members[2]);
  throw DataError("factor graph json: factor must have 2 or 3 members");
}

}  // namespace

std::string export_json(const FactorGraph& graph) {
  nlohmann::ordered_json j;
  j["p"] = graph.p();
  j["variables"] = graph.variable_nodes;
  j["pairwise_as_edge"] = graph.pairwise_as_edge;
  j["nodewise"] = graph.nodewise;
  auto factors = nlohmann::ordered_json::array();
  for (const auto& f : graph.factor_nodes) {
    nlohmann::ordered_json jf;
    jf["order"] = f.order;
    jf["members"] = term_to_json(f.members);
    jf["weight"] = f.weight;
    jf["sign"] = f.sign;
    factors.push_back(std::move(jf));
  }
  j["factors"] = std::move(factors);
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) {
    nlohmann::ordered_json je;
    je["factor"] = e.factor;
    je["variable"] = e.variable;
    je["weight"] = e.weight;
    je["directed"] = e.directed;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  auto pw = nlohmann::ordered_json::array();
  for (const auto& e : graph.pairwise_edges) {
    nlohmann::ordered_json je;
    je["i"] = e.i;
    je["j"] = e.j;
    je["weight"] = e.weight;
    je["sign"] = e.sign;
    pw.push_back(std::move(je));
  }
  j["pairwise_edges"] = std::move(pw);
  return j.dump(2) + "\n";
}

FactorGraph factor_graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("factor graph json: ") + e.what());
  }
  FactorGraph g;
  g.variable_nodes = j.at("variables").get<std::vector<std::string>>();
  g.pairwise_as_edge = j.at("pairwise_as_edge").get<bool>();
  g.nodewise = j.at("nodewise").get<bool>();
  for (const auto& jf : j.at("factors")) {
    FactorNode f;
    f.order = jf.at("order").get<int>();
    f.members = term_from_members(jf.at("members").get<std::vector<int>>());
    f.weight = jf.at("weight").get<double>();
    f.sign = jf.at("sign").get<int>();
    g.factor_nodes.push_back(f);
  }
  for (const auto& je : j.at("edges")) {
    FactorEdge e;
    e.factor = je.at("factor").get<int>();
    e.variable = je.at("variable").get<int>();
    e.weight = je.at("weight").get<double>();
    e.directed = je.at("directed").get<bool>();
    g.edges.push_back(e);
  }
  for (const auto& je : j.at("pairwise_edges")) {
    PairwiseEdge e;
    e.i = je.at("i").get<int>();
    e.j = je.at("j").get<int>();
    e.weight = je.at("weight").get<double>();
    e.sign = je.at("sign").get<int>();
    g.pairwise_edges.push_back(e);
  }
  return g;
}

}  // namespace modnet
