#include <doctest.h>

#include <map>

#include "modnet/sampler.hpp"
#include "modnet/simgen.hpp"

using namespace modnet;

TEST_CASE("random generating models satisfy every structural constraint") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const GeneratingModelInfo info = random_mnm(seed);
    const MnmModel& m = info.model;
    CHECK(m.p == 13);
    CHECK(info.moderator == 13);
    CHECK(info.edge_types.size() == 6);

    std::map<int, int> degree;
    std::map<EdgeType, int> type_counts;
    for (const auto& [key, type] : info.edge_types) {
      CHECK(key.first >= 1);
      CHECK(key.second <= 12);  // the moderator is never an endpoint
      ++degree[key.first];
      ++degree[key.second];
      ++type_counts[type];
    }
    for (const auto& [node, d] : degree) CHECK(d <= 2);
    CHECK(type_counts[EdgeType::Unmoderated] == 2);
    CHECK(type_counts[EdgeType::PartiallyModerated] == 2);
    CHECK(type_counts[EdgeType::FullyModerated] == 2);

    CHECK(m.beta.size() == 4);   // 2 unmoderated + 2 partial
    CHECK(m.omega.size() == 4);  // 2 partial + 2 full
    for (const auto& [key, v] : m.beta) CHECK(v == 0.2);
    for (const auto& [key, v] : m.omega) {
      CHECK(v == 0.2);
      CHECK(key[2] == 13);  // all moderation flows through node 13
    }
    CHECK((m.alpha.array() == 0.0).all());
    CHECK((m.sigma.array() == 1.0).all());
    for (const auto& [key, type] : info.edge_types) {
      const double b = m.get_beta(key.first, key.second);
      const double w = m.get_omega(key.first, key.second, 13);
      switch (type) {
        case EdgeType::Unmoderated: CHECK(b != 0.0); CHECK(w == 0.0); break;
        case EdgeType::PartiallyModerated: CHECK(b != 0.0); CHECK(w != 0.0); break;
        case EdgeType::FullyModerated: CHECK(b == 0.0); CHECK(w != 0.0); break;
      }
    }
  }
}

TEST_CASE("same seed, same model") {
  const GeneratingModelInfo a = random_mnm(424242);
  const GeneratingModelInfo b = random_mnm(424242);
  CHECK(a.model == b.model);
  CHECK(a.edge_types == b.edge_types);
}

TEST_CASE("true-parameter keys per class") {
  const GeneratingModelInfo info = random_mnm(5);
  CHECK(info.true_pairwise(ParamType::PwUnmod).size() == 2);
  CHECK(info.true_pairwise(ParamType::PwOfPartial).size() == 2);
  CHECK(info.true_threeway(ParamType::ModOfPartial).size() == 2);
  CHECK(info.true_threeway(ParamType::ModFull).size() == 2);
  for (const auto& key : info.true_threeway(ParamType::ModFull))
    CHECK(info.model.get_omega(key[0], key[1], key[2]) == 0.2);
}

TEST_CASE("isolated-types model matches its fixed structure") {
  const GeneratingModelInfo info = isolated_types_model();
  const MnmModel& m = info.model;
  CHECK(m.p == 8);
  CHECK(m.beta.size() == 2);
  CHECK(m.omega.size() == 2);
  CHECK(m.get_beta(7, 8) == 0.2);
  CHECK(m.get_beta(5, 6) == 0.2);
  CHECK(m.get_omega(1, 2, 3) == 0.2);
  CHECK(m.get_omega(4, 5, 6) == 0.2);
  CHECK(m.get_beta(1, 2) == 0.0);
  CHECK(m.get_beta(1, 3) == 0.0);
  CHECK(m.get_beta(2, 3) == 0.0);
  // node 4 moderates but has no pairwise edge
  for (const auto& [key, v] : m.beta) {
    CHECK(key.first != 4);
    CHECK(key.second != 4);
  }
  CHECK(info.fit_moderators.members == std::vector<int>{1, 4});
  CHECK(isolated_types_model().model == m);  // no randomness

  CHECK(info.true_pairwise(ParamType::PwUnmod) == std::vector<PairKey>{{7, 8}});
  CHECK(info.true_pairwise(ParamType::PwOfPartial) == std::vector<PairKey>{{5, 6}});
  CHECK(info.true_threeway(ParamType::ModFull) ==
        std::vector<TripleKey>{TripleKey{1, 2, 3}});
  CHECK(info.true_threeway(ParamType::ModOfPartial) ==
        std::vector<TripleKey>{TripleKey{4, 5, 6}});
}

TEST_CASE("uncorrelated-neighbors models") {
  CHECK_THROWS_AS(uncorrelated_neighbors_ggm(0), DataError);
  CHECK_THROWS_AS(uncorrelated_neighbors_ggm(5), DataError);

  const MnmModel one = uncorrelated_neighbors_ggm(1);
  CHECK(one.p == 20);
  CHECK(one.beta.size() == 1);
  CHECK(one.get_beta(1, 2) == 0.2);
  CHECK(one.omega.empty());

  const MnmModel four = uncorrelated_neighbors_ggm(4);
  CHECK(four.beta.size() == 4);
  for (int j = 2; j <= 5; ++j) CHECK(four.get_beta(1, j) == 0.2);
  // neighbors are mutually unconnected
  for (const auto& [key, v] : four.beta) CHECK(key.first == 1);
}

TEST_CASE("neighbors of node 1 are empirically uncorrelated") {
  const MnmModel m = uncorrelated_neighbors_ggm(4);
  SamplerConfig cfg;
  cfg.seed = 17;
  const SampleBatch batch = gibbs_sample(m, 5000, cfg);
  const auto col = [&](int j) {
    return (batch.data.col(j - 1).array() - batch.data.col(j - 1).mean()).matrix();
  };
  const Eigen::VectorXd x2 = col(2), x3 = col(3);
  const double corr = x2.dot(x3) / std::sqrt(x2.squaredNorm() * x3.squaredNorm());
  CHECK(std::abs(corr) < 0.06);
}
