#include <benchmark/benchmark.h>

#include "modnet/estimator.hpp"
#include "modnet/harness.hpp"
#include "modnet/sampler.hpp"
#include "modnet/simgen.hpp"
#include "modnet/standardize.hpp"

namespace {

using namespace modnet;

StandardizedData sim_data(int n, std::uint64_t seed) {
  const GeneratingModelInfo info = random_mnm(seed);
  SamplerConfig cfg;
  cfg.seed = seed + 1;
  RawData raw;
  raw.values = gibbs_sample(info.model, n, cfg).data;
  return standardize(raw);
}

void BM_GibbsSample(benchmark::State& state) {
  const GeneratingModelInfo info = random_mnm(7);
  SamplerConfig cfg;
  cfg.seed = 11;
  for (auto _ : state) {
    auto batch = gibbs_sample(info.model, static_cast<int>(state.range(0)), cfg);
    benchmark::DoNotOptimize(batch.data.data());
  }
}
BENCHMARK(BM_GibbsSample)->Arg(100)->Arg(1000);

void BM_LassoPath(benchmark::State& state) {
  const auto data = sim_data(static_cast<int>(state.range(0)), 3);
  const DesignMatrix X = build_design(data, 13, ModeratorSet::of({13}, 13));
  const Eigen::VectorXd y = data.values.col(12);
  for (auto _ : state) {
    auto fits = fit_path(X, y, PathConfig{});
    benchmark::DoNotOptimize(fits.data());
  }
}
BENCHMARK(BM_LassoPath)->Arg(407)->Arg(1808);

void BM_FitMnm(benchmark::State& state) {
  const auto data = sim_data(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) {
    auto model = fit_mnm(data, ModeratorSet::of({13}, 13), AggregationRule::And);
    benchmark::DoNotOptimize(model.p);
  }
}
BENCHMARK(BM_FitMnm)->Arg(407)->Arg(1808);

void BM_FitSequential(benchmark::State& state) {
  const auto data = sim_data(static_cast<int>(state.range(0)), 9);
  for (auto _ : state) {
    auto combined = fit_sequential(data, AggregationRule::And);
    benchmark::DoNotOptimize(combined.union_model.p);
  }
}
BENCHMARK(BM_FitSequential)->Arg(407);

void BM_MedianSplit(benchmark::State& state) {
  const GeneratingModelInfo info = random_mnm(13);
  SamplerConfig cfg;
  cfg.seed = 17;
  RawData raw;
  raw.values = gibbs_sample(info.model, static_cast<int>(state.range(0)), cfg).data;
  for (auto _ : state) {
    auto split = median_split_baseline(raw, 13);
    benchmark::DoNotOptimize(split.flagged_edges.data());
  }
}
BENCHMARK(BM_MedianSplit)->Arg(591);

}  // namespace

BENCHMARK_MAIN();
