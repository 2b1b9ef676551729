#include <doctest.h>

#include <sstream>

#include "modnet/harness.hpp"
#include "modnet/rng.hpp"
#include "modnet/sampler.hpp"

using namespace modnet;

namespace {

RecoveryRecord make_record(int rep, int n, EstimatorKind est, ParamType type,
                           int true_count, int recovered, int est_pw, int tp_pw,
                           int est_tw, int tp_tw) {
  RecoveryRecord r;
  r.replication = rep;
  r.n = n;
  r.estimator = est;
  r.param_type = type;
  r.true_count = true_count;
  r.recovered_count = recovered;
  r.est_pairwise_total = est_pw;
  r.true_positive_pairwise = tp_pw;
  r.est_threeway_total = est_tw;
  r.true_positive_threeway = tp_tw;
  return r;
}

}  // namespace

TEST_CASE("sensitivity ratios") {
  std::vector<RecoveryRecord> records;
  for (int rep = 0; rep < 10; ++rep)
    records.push_back(make_record(rep, 100, EstimatorKind::Mnm1, ParamType::PwUnmod,
                                  2, 1, 0, 0, 0, 0));
  CHECK(sensitivity(records, EstimatorKind::Mnm1, ParamType::PwUnmod, 100) ==
        doctest::Approx(0.5));

  records.clear();
  records.push_back(make_record(0, 50, EstimatorKind::Mnm3, ParamType::ModFull, 2, 2,
                                0, 0, 0, 0));
  CHECK(sensitivity(records, EstimatorKind::Mnm3, ParamType::ModFull, 50) == 1.0);
  records[0].recovered_count = 0;
  CHECK(sensitivity(records, EstimatorKind::Mnm3, ParamType::ModFull, 50) == 0.0);
  CHECK_THROWS_AS(sensitivity(records, EstimatorKind::Mnm1, ParamType::ModFull, 50),
                  DataError);
}

TEST_CASE("precision averaging and the UNDEFINED rule") {
  std::vector<RecoveryRecord> records;
  SUBCASE("zero estimates in every replication is undefined") {
    for (int rep = 0; rep < 10; ++rep)
      records.push_back(make_record(rep, 100, EstimatorKind::Mnm1, ParamType::PwUnmod,
                                    2, 0, 0, 0, 0, 0));
    CHECK_FALSE(
        precision(records, EstimatorKind::Mnm1, ParamClass::Pairwise, 100).has_value());
  }
  SUBCASE("defined in fewer than five replications is undefined") {
    for (int rep = 0; rep < 10; ++rep) {
      const int est = rep < 4 ? 2 : 0;
      records.push_back(make_record(rep, 100, EstimatorKind::Mnm1, ParamType::PwUnmod,
                                    2, 0, est, est, 0, 0));
    }
    CHECK_FALSE(
        precision(records, EstimatorKind::Mnm1, ParamClass::Pairwise, 100).has_value());
  }
  SUBCASE("defined replications are averaged; duplicates per type row ignored") {
    for (int rep = 0; rep < 6; ++rep) {
      // two param-type rows per replication with identical totals
      records.push_back(make_record(rep, 100, EstimatorKind::Mnm1, ParamType::PwUnmod,
                                    2, 1, 4, rep % 2 ? 4 : 2, 0, 0));
      records.push_back(make_record(rep, 100, EstimatorKind::Mnm1,
                                    ParamType::PwOfPartial, 2, 1, 4, rep % 2 ? 4 : 2,
                                    0, 0));
    }
    const auto pr = precision(records, EstimatorKind::Mnm1, ParamClass::Pairwise, 100);
    REQUIRE(pr.has_value());
    CHECK(*pr == doctest::Approx(0.75));  // mean of 0.5 and 1.0 alternating
  }
}

TEST_CASE("median split: identical halves produce no flags") {
  Xoshiro256pp rng(7);
  const int half = 40, p = 4;
  RawData d;
  d.values.resize(2 * half, p);
  for (int i = 0; i < half; ++i) {
    for (int j = 0; j < p - 1; ++j) d.values(i, j) = rng.next_normal();
    d.values(i, p - 1) = rng.next_normal();  // moderator
  }
  // high half duplicates everything; the moderator is shifted far up
  for (int i = 0; i < half; ++i) {
    for (int j = 0; j < p - 1; ++j) d.values(half + i, j) = d.values(i, j);
    d.values(half + i, p - 1) = d.values(i, p - 1) + 100.0;
  }
  const SplitResult split = median_split_baseline(d, p);
  CHECK(split.n_low == half);
  CHECK(split.n_high == half);
  CHECK(split.flagged_edges.empty());
}

TEST_CASE("median split: degenerate inputs") {
  Xoshiro256pp rng(8);
  RawData d;
  d.values.resize(50, 3);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 3; ++j) d.values(i, j) = rng.next_normal();

  SUBCASE("constant moderator cannot split") {
    d.values.col(2).setConstant(4.0);
    CHECK_THROWS_AS(median_split_baseline(d, 3), DataError);
  }
  SUBCASE("too few rows") {
    RawData tiny;
    tiny.values = d.values.topRows(12);
    CHECK_THROWS_AS(median_split_baseline(tiny, 3), DataError);
  }
  SUBCASE("bad moderator index") {
    CHECK_THROWS_AS(median_split_baseline(d, 0), DataError);
    CHECK_THROWS_AS(median_split_baseline(d, 4), DataError);
  }
}

TEST_CASE("median split flags a strongly moderated edge at large n") {
  // X1 ~ X2 interaction flips with the moderator X4
  Xoshiro256pp rng(9);
  const int n = 1000;
  RawData d;
  d.values.resize(n, 4);
  for (int i = 0; i < n; ++i) {
    const double x4 = rng.next_normal();
    const double x2 = rng.next_normal();
    const double x3 = rng.next_normal();
    const double x1 = 0.5 * x2 * x4 + rng.next_normal();
    d.values(i, 0) = x1;
    d.values(i, 1) = x2;
    d.values(i, 2) = x3;
    d.values(i, 3) = x4;
  }
  const SplitResult split = median_split_baseline(d, 4);
  bool found = false;
  for (const auto& f : split.flagged_edges)
    if (f.i == 1 && f.j == 2 && f.direction_sign == 1) found = true;
  CHECK(found);
}

TEST_CASE("small simulation run produces well-formed records") {
  SimConfig cfg;
  cfg.n_grid = {30, 63};
  cfg.replications = 2;
  cfg.estimators = {EstimatorKind::Mnm1, EstimatorKind::Mnm2, EstimatorKind::Mnm3,
                    EstimatorKind::Split};
  cfg.seed = 11;
  cfg.jobs = 2;
  const SimResult result = run_simulation(cfg);

  const int reps_done = 2 - static_cast<int>(result.skipped_replications.size());
  CHECK(static_cast<int>(result.records.size()) == reps_done * 2 * (4 + 4 + 4 + 2));
  for (const auto& r : result.records) {
    CHECK(r.recovered_count <= r.true_count);
    CHECK(r.recovered_count >= 0);
    CHECK(r.true_count == 2);
    CHECK(r.true_positive_pairwise <= r.est_pairwise_total);
    CHECK(r.true_positive_threeway <= r.est_threeway_total);
    if (r.estimator == EstimatorKind::Split) {
      const bool mod_type = r.param_type == ParamType::ModOfPartial ||
                            r.param_type == ParamType::ModFull;
      CHECK(mod_type);
      CHECK(r.est_pairwise_total == 0);
    }
  }

  // per-replication: the union never loses a pairwise detection
  for (int n : cfg.n_grid) {
    for (int rep = 0; rep < 2; ++rep) {
      for (ParamType t : {ParamType::PwUnmod, ParamType::PwOfPartial}) {
        int rec1 = -1, rec2 = -1;
        for (const auto& r : result.records) {
          if (r.replication != rep || r.n != n || r.param_type != t) continue;
          if (r.estimator == EstimatorKind::Mnm1) rec1 = r.recovered_count;
          if (r.estimator == EstimatorKind::Mnm2) rec2 = r.recovered_count;
        }
        if (rec1 >= 0 && rec2 >= 0) CHECK(rec2 >= rec1);
      }
    }
  }

  const std::string tables = summary_tables(result, cfg);
  CHECK(tables.find("PW_UNMOD") != std::string::npos);
  CHECK(tables.find("MNM (1) SE") != std::string::npos);
  CHECK(tables.find("SPLIT") != std::string::npos);

  std::ostringstream csv;
  write_records_csv(csv, result.records);
  CHECK(csv.str().find("replication,n,estimator,metric,param,value") == 0);
  CHECK(csv.str().find("MNM1,recovered,PW_UNMOD") != std::string::npos);
  CHECK(csv.str().find("SPLIT,est_total,threeway") != std::string::npos);
}

TEST_CASE("isolated-types protocol reports one true parameter per class") {
  SimConfig cfg;
  cfg.n_grid = {30, 63};
  cfg.replications = 2;
  cfg.seed = 21;
  cfg.jobs = 2;
  const SimResult result = run_isolated_types(cfg);
  const int reps_done = 2 - static_cast<int>(result.skipped_replications.size());
  CHECK(static_cast<int>(result.records.size()) == reps_done * 2 * 4);
  for (const auto& r : result.records) {
    CHECK(r.estimator == EstimatorKind::Mnm1);
    CHECK(r.true_count == 1);
  }
}

TEST_CASE("isolated types: blind at n=30, consistent at n=1808") {
  SimConfig cfg;
  cfg.n_grid = {30, 1808};
  cfg.replications = 20;
  cfg.seed = 21;
  cfg.jobs = 2;
  const SimResult result = run_isolated_types(cfg);
  for (ParamType t : {ParamType::PwUnmod, ParamType::PwOfPartial,
                      ParamType::ModOfPartial, ParamType::ModFull}) {
    CHECK(sensitivity(result.records, EstimatorKind::Mnm1, t, 30) <= 0.15);
    CHECK(sensitivity(result.records, EstimatorKind::Mnm1, t, 1808) >= 0.95);
  }
}

TEST_CASE("every neighbor count is recovered at n=1808") {
  SimConfig cfg;
  cfg.n_grid = {1808};
  cfg.replications = 10;
  cfg.seed = 5;
  cfg.jobs = 2;
  const auto per_k = run_neighbors_experiment(cfg);
  for (int k = 1; k <= 4; ++k)
    CHECK(sensitivity(per_k.at(k).records, EstimatorKind::Mnm1, ParamType::PwUnmod,
                      1808) >= 0.95);
}

TEST_CASE("neighbors protocol tracks k true edges") {
  SimConfig cfg;
  cfg.n_grid = {63};
  cfg.replications = 2;
  cfg.seed = 31;
  cfg.jobs = 2;
  const auto per_k = run_neighbors_experiment(cfg);
  REQUIRE(per_k.size() == 4);
  for (const auto& [k, result] : per_k) {
    for (const auto& r : result.records) {
      CHECK(r.param_type == ParamType::PwUnmod);
      CHECK(r.true_count == k);
      CHECK(r.recovered_count <= k);
    }
  }
}

TEST_CASE("more uncorrelated neighbors raise detection at mid-range n") {
  SimConfig cfg;
  cfg.n_grid = {407};
  cfg.replications = 20;
  cfg.seed = 3;
  cfg.jobs = 2;
  const auto per_k = run_neighbors_experiment(cfg);
  double sens[5];
  for (int k = 1; k <= 4; ++k)
    sens[k] =
        sensitivity(per_k.at(k).records, EstimatorKind::Mnm1, ParamType::PwUnmod, 407);
  CHECK(sens[4] > sens[1]);
  int inversions = 0;
  for (int k = 2; k <= 4; ++k)
    if (sens[k] < sens[k - 1] - 0.05) ++inversions;
  CHECK(inversions <= 1);
}

TEST_CASE("sim config validation") {
  SimConfig cfg;
  cfg.n_grid = {50, 50};
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg.n_grid = {50, 100};
  cfg.replications = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg.replications = 1;
  cfg.estimators.clear();
  CHECK_THROWS_AS(cfg.validate(), DataError);
}
