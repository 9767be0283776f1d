#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "poth/poth.hpp"
#include "poth/ranking.hpp"
#include "poth/resampling.hpp"

namespace {

using namespace poth;

TreatmentSet labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("T" + std::to_string(i + 1));
  return TreatmentSet(std::move(out), Direction::larger_is_better);
}

// Equicorrelated contrasts against T1, the usual shape of a star network.
ReferenceEffects reference(std::size_t n) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> z(0.0, 0.5);
  Eigen::VectorXd effects(static_cast<Eigen::Index>(n - 1));
  for (auto& e : effects) e = z(rng);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(effects.size(), effects.size(), 0.02);
  cov.diagonal().array() += 0.04;
  return ReferenceEffects(std::move(effects), std::move(cov), "T1", labels(n));
}

DrawsMatrix draws(std::size_t n, std::size_t n_draws) {
  return sample_mvn(reference(n), n_draws, 1, ExecutionPolicy{1});
}

void BM_SampleMvn(benchmark::State& state) {
  const auto r = reference(static_cast<std::size_t>(state.range(0)));
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sample_mvn(r, kDefaultDraws, 7, ExecutionPolicy{threads}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kDefaultDraws));
}
BENCHMARK(BM_SampleMvn)->ArgsProduct({{5, 20}, {1, 4}})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_RankProbsFromDraws(benchmark::State& state) {
  const auto d = draws(static_cast<std::size_t>(state.range(0)), kDefaultDraws);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(rank_probs_from_draws(d, ExecutionPolicy{threads}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kDefaultDraws));
}
BENCHMARK(BM_RankProbsFromDraws)->ArgsProduct({{5, 20}, {1, 4}})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_PScoreFromPairwise(benchmark::State& state) {
  const auto p = pairwise_from_reference(reference(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(pscore_from_pairwise(p));
}
BENCHMARK(BM_PScoreFromPairwise)->RangeMultiplier(2)->Range(4, 64);

void BM_ResidualsPairwise(benchmark::State& state) {
  const auto p = pairwise_from_reference(reference(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(poth_residuals(p, ExecutionPolicy{1}));
}
BENCHMARK(BM_ResidualsPairwise)->RangeMultiplier(2)->Range(4, 64);

void BM_ResidualsDraws(benchmark::State& state) {
  const auto d = draws(static_cast<std::size_t>(state.range(0)), kDefaultDraws);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(poth_residuals(d, ExecutionPolicy{threads}));
}
BENCHMARK(BM_ResidualsDraws)->ArgsProduct({{5, 20}, {1, 4}})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_CumulativeDraws(benchmark::State& state) {
  const auto d = draws(static_cast<std::size_t>(state.range(0)), kDefaultDraws);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(cumulative_poth(d, ExecutionPolicy{threads}));
}
BENCHMARK(BM_CumulativeDraws)->ArgsProduct({{5, 20}, {1, 4}})->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
