#include "fairclust/data.hpp"
#include "fairclust/fairness.hpp"
#include "fairclust/objectives.hpp"
#include "fairclust/rng.hpp"
#include "fairclust/solver.hpp"

#include <benchmark/benchmark.h>

using namespace fairclust;

namespace {

struct Instance {
  Matrix x;
  DemographicPartition demo;
  SoftAssignment soft;
};

Instance make_instance(Index n, Index k, Index d) {
  Rng rng(1);
  Instance in;
  in.x.resize(n, d);
  std::vector<int> groups(static_cast<std::size_t>(n));
  Matrix s(n, k);
  for (Index p = 0; p < n; ++p) {
    for (Index j = 0; j < d; ++j) in.x(p, j) = rng.normal();
    groups[static_cast<std::size_t>(p)] = rng.uniform() < 0.4 ? 0 : 1;
    double total = 0.0;
    for (Index c = 0; c < k; ++c) total += s(p, c) = 0.05 + rng.uniform();
    s.row(p) /= total;
  }
  in.demo = DemographicPartition(groups, 2, {0.4, 0.6});
  in.soft = SoftAssignment(s);
  return in;
}

void BM_SoftmaxUpdate(benchmark::State& state) {
  const Instance in = make_instance(state.range(0), state.range(1), 5);
  const UnaryPotentials a = kmeans_potentials(in.x, in.soft).potentials;
  SolverConfig config;
  config.lambda = 100.0;
  const UnaryPotentials b = fairness_bound_potentials(in.soft, in.demo, config);
  for (auto _ : state) benchmark::DoNotOptimize(softmax_update(in.soft, a, b, config.lambda));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_AuxiliaryValue(benchmark::State& state) {
  const Instance in = make_instance(state.range(0), state.range(1), 5);
  const UnaryPotentials a = kmeans_potentials(in.x, in.soft).potentials;
  SolverConfig config;
  config.lambda = 100.0;
  const UnaryPotentials b = fairness_bound_potentials(in.soft, in.demo, config);
  const SoftAssignment next = softmax_update(in.soft, a, b, config.lambda);
  for (auto _ : state) benchmark::DoNotOptimize(auxiliary_value(next, in.soft, a, b, config.lambda));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_FairnessBound(benchmark::State& state) {
  const Instance in = make_instance(state.range(0), state.range(1), 5);
  SolverConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(fairness_bound_potentials(in.soft, in.demo, config));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_KMeansPotentials(benchmark::State& state) {
  const Instance in = make_instance(state.range(0), state.range(1), 5);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_potentials(in.x, in.soft));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_KMedianPotentials(benchmark::State& state) {
  const Instance in = make_instance(state.range(0), state.range(1), 5);
  const SoftAssignment hard = binarize(hard_labels(in.soft), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kmedian_potentials(in.x, hard));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_NcutPotentials(benchmark::State& state) {
  const Instance in = make_instance(state.range(0), state.range(1), 5);
  const AffinityGraph g = knn_affinity(in.x, 20);
  for (auto _ : state) benchmark::DoNotOptimize(ncut_potentials(g, in.soft));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_KnnAffinity(benchmark::State& state) {
  const Instance in = make_instance(state.range(0), 2, 5);
  for (auto _ : state) benchmark::DoNotOptimize(knn_affinity(in.x, 20));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SolveSynthetic(benchmark::State& state) {
  const Dataset ds = preprocess(make_synthetic(SyntheticKind::kEqual, 0));
  ClusteringProblem problem;
  problem.kind = static_cast<ObjectiveKind>(state.range(0));
  problem.n_clusters = 2;
  problem.features = ds.features;
  if (problem.kind == ObjectiveKind::kNcut) problem.graph = knn_affinity(ds.features, 20);
  const Labels init = kmeanspp_seed(ds.features, 2, 0);
  SolverConfig config;
  config.lambda = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve(problem, ds.demographics(), init, config));
  state.SetLabel(std::string(to_string(problem.kind)));
}

}  // namespace

BENCHMARK(BM_SoftmaxUpdate)->Args({10000, 10})->Args({100000, 20});
BENCHMARK(BM_AuxiliaryValue)->Args({10000, 10})->Args({100000, 20});
BENCHMARK(BM_FairnessBound)->Args({10000, 10})->Args({100000, 20});
BENCHMARK(BM_KMeansPotentials)->Args({10000, 10})->Args({100000, 20});
BENCHMARK(BM_KMedianPotentials)->Args({2000, 10});
BENCHMARK(BM_NcutPotentials)->Args({10000, 10});
BENCHMARK(BM_KnnAffinity)->Arg(2000)->Arg(10000);
BENCHMARK(BM_SolveSynthetic)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
