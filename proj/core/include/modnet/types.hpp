#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "modnet/errors.hpp"

namespace modnet {

using PairKey = std::pair<int, int>;          // canonical: i < j, 1-based
using TripleKey = std::array<int, 3>;         // canonical: i < j < q, 1-based

inline PairKey make_pair_key(int i, int j) {
  if (i == j) throw std::invalid_argument("pair key with repeated index");
  return i < j ? PairKey{i, j} : PairKey{j, i};
}

inline TripleKey make_triple_key(int i, int j, int q) {
  TripleKey k{i, j, q};
  std::sort(k.begin(), k.end());
  if (k[0] == k[1] || k[1] == k[2])
    throw std::invalid_argument("triple key with repeated index");
  return k;
}

enum class TermKind { Main, Pairwise, ThreeWay };

// Identifies one candidate term: a main effect X_j, a pairwise interaction
// (i,j), or a 3-way interaction (i,j,q). Indices are 1-based and strictly
// increasing within a kind.
struct TermId {
  TermKind kind{TermKind::Main};
  std::array<int, 3> idx{0, 0, 0};

  static TermId main(int j) {
    if (j < 1) throw std::invalid_argument("TermId: index must be >= 1");
    return {TermKind::Main, {j, 0, 0}};
  }
  static TermId pairwise(int i, int j) {
    if (i < 1 || !(i < j)) throw std::invalid_argument("TermId: pairwise requires 1 <= i < j");
    return {TermKind::Pairwise, {i, j, 0}};
  }
  static TermId threeway(int i, int j, int q) {
    if (i < 1 || !(i < j && j < q))
      throw std::invalid_argument("TermId: threeway requires 1 <= i < j < q");
    return {TermKind::ThreeWay, {i, j, q}};
  }

  int order() const {
    switch (kind) {
      case TermKind::Main: return 1;
      case TermKind::Pairwise: return 2;
      case TermKind::ThreeWay: return 3;
    }
    return 0;
  }

  friend auto operator<=>(const TermId&, const TermId&) = default;
};

// The set of variables whose moderation effects are included in a model.
// A 3-way term (i,j,q) is admissible iff {i,j,q} intersects the set.
struct ModeratorSet {
  std::vector<int> members;  // sorted, unique, 1-based

  static ModeratorSet none() { return {}; }
  static ModeratorSet all(int p) {
    ModeratorSet m;
    m.members.resize(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) m.members[static_cast<std::size_t>(i)] = i + 1;
    return m;
  }
  static ModeratorSet of(std::vector<int> v, int p) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (int m : v)
      if (m < 1 || m > p)
        throw DataError("moderator index out of range: " + std::to_string(m));
    return {std::move(v)};
  }

  bool empty() const { return members.empty(); }
  bool contains(int m) const {
    return std::binary_search(members.begin(), members.end(), m);
  }
  bool admits(int i, int j, int q) const {
    return contains(i) || contains(j) || contains(q);
  }
  friend bool operator==(const ModeratorSet&, const ModeratorSet&) = default;
};

// n x p numeric matrix as read from disk, plus column labels.
struct RawData {
  Eigen::MatrixXd values;
  std::vector<std::string> column_names;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }

  // Enforces n >= 2, p >= 3, all entries finite, every column with nonzero
  // sample variance. Throws DataError naming the offending column.
  void validate() const;

  RawData head(int rows) const {
    RawData out;
    out.values = values.topRows(rows);
    out.column_names = column_names;
    return out;
  }
};

// Column-standardized data together with the original-unit means and SDs
// needed to back-transform.
struct StandardizedData {
  Eigen::MatrixXd values;
  Eigen::VectorXd means;
  Eigen::VectorXd sds;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

// Natural-parameter form of the joint model: intercepts alpha, pairwise
// weights beta (canonical keys i<j), 3-way weights omega (i<j<q), and the
// conditional SDs sigma. Zero-valued parameters are not stored.
struct MnmModel {
  int p{0};
  Eigen::VectorXd alpha;
  std::map<PairKey, double> beta;
  std::map<TripleKey, double> omega;
  Eigen::VectorXd sigma;

  static MnmModel empty(int p) {
    MnmModel m;
    m.p = p;
    m.alpha = Eigen::VectorXd::Zero(p);
    m.sigma = Eigen::VectorXd::Ones(p);
    return m;
  }

  void set_beta(int i, int j, double v) {
    check_index(i); check_index(j);
    auto key = make_pair_key(i, j);
    if (v == 0.0) beta.erase(key); else beta[key] = v;
  }
  void set_omega(int i, int j, int q, double v) {
    check_index(i); check_index(j); check_index(q);
    auto key = make_triple_key(i, j, q);
    if (v == 0.0) omega.erase(key); else omega[key] = v;
  }
  double get_beta(int i, int j) const {
    check_index(i); check_index(j);
    auto it = beta.find(make_pair_key(i, j));
    return it == beta.end() ? 0.0 : it->second;
  }
  double get_omega(int i, int j, int q) const {
    check_index(i); check_index(j); check_index(q);
    auto it = omega.find(make_triple_key(i, j, q));
    return it == omega.end() ? 0.0 : it->second;
  }

  void check_index(int i) const {
    if (i < 1 || i > p)
      throw DataError("variable index out of range: " + std::to_string(i));
  }

  friend bool operator==(const MnmModel& a, const MnmModel& b) {
    return a.p == b.p && a.alpha.size() == b.alpha.size() &&
           (a.alpha.array() == b.alpha.array()).all() && a.beta == b.beta &&
           a.omega == b.omega && a.sigma.size() == b.sigma.size() &&
           (a.sigma.array() == b.sigma.array()).all();
  }
};

// Number of pairwise terms C(p,2) and of admissible 3-way terms under the
// given moderator set, counted by direct enumeration.
std::pair<long, long> count_terms(int p, const ModeratorSet& mods);

// Number of candidate predictors in the nodewise regression on s:
// (p-1) main terms plus admissible products X_i*X_j with i<j, i,j != s.
long nodewise_param_count(int p, const ModeratorSet& mods, int s);

}  // namespace modnet
