#include <benchmark/benchmark.h>

#include <random>

#include "pdthreat/corruptions.hpp"
#include "pdthreat/kcenter.hpp"
#include "pdthreat/sublevel.hpp"
#include "pdthreat/synthetic.hpp"
#include "pdthreat/threat.hpp"
#include "pdthreat/unsafe_index.hpp"

namespace {

using namespace pdthreat;

LabeledDataset blobs(std::size_t n, std::size_t dim, std::size_t classes) {
  BlobOptions o;
  o.n = n;
  o.dim = dim;
  o.num_classes = classes;
  o.seed = 1;
  return make_blobs(o);
}

// Greedy k-center over one class: O(k |S_c|) similarity evaluations.
void BM_GreedyKCenter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto ds = blobs(n, 256, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_kcenter({ds.data, ds.dim}, k, 0));
  }
}
BENCHMARK(BM_GreedyKCenter)->Args({500, 10})->Args({500, 50})->Args({2000, 50});

// Directions plus one PD evaluation per query, (C-1) k directions.
void BM_PdThreatPerQuery(benchmark::State& state) {
  const auto classes = static_cast<std::size_t>(state.range(0));
  const auto ds = blobs(classes * 60, 3072, classes);
  const auto index = build_index(ds, kDefaultK, kDefaultBeta, 0);
  const Vec x = to_vec(ds.row(0));
  Vec delta(ds.dim, 0.01);
  for (auto _ : state) {
    const auto dirs = unsafe_directions(index, x, ds.labels[0]);
    benchmark::DoNotOptimize(pd_threat(dirs, delta));
  }
  state.counters["directions"] = static_cast<double>((classes - 1) * kDefaultK);
}
BENCHMARK(BM_PdThreatPerQuery)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_EvaluateBatch(benchmark::State& state) {
  const auto threads = static_cast<std::size_t>(state.range(0));
  const auto ds = blobs(300, 64, 3);
  const auto index = build_index(ds, kDefaultK, kDefaultBeta, 0);
  const auto noisy = corrupt_dataset(ds, CorruptionStyle::kGaussianNoise, 3, 0,
                                     default_geometry(ds.dim));
  EvalOptions opts;
  opts.threads = threads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_batch(Metric::kPd, ds, noisy, &index, opts));
  }
}
BENCHMARK(BM_EvaluateBatch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_GreedyProject(benchmark::State& state) {
  const auto ds = blobs(300, 64, 3);
  const auto index = build_index(ds, kDefaultK, kDefaultBeta, 0);
  const auto dirs = unsafe_directions(index, to_vec(ds.row(0)), ds.labels[0]);
  const auto set = build_sublevel(dirs, 0.5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.3);
  Vec delta(ds.dim);
  for (auto& v : delta) v = g(rng);
  const auto mode = state.range(0) == 0 ? GreedyMode::kCorrected : GreedyMode::kPlain;
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_project(set, delta, kDefaultMaxIters, -1.0, mode));
  }
}
BENCHMARK(BM_GreedyProject)->Arg(0)->Arg(1);

void BM_LazyProject(benchmark::State& state) {
  const auto ds = blobs(300, 64, 3);
  const auto index = build_index(ds, kDefaultK, kDefaultBeta, 0);
  const auto dirs = unsafe_directions(index, to_vec(ds.row(0)), ds.labels[0]);
  Vec delta(ds.dim, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(lazy_project(dirs, delta, 0.5));
}
BENCHMARK(BM_LazyProject);

void BM_Corruption(benchmark::State& state) {
  const auto style = kAllStyles[static_cast<std::size_t>(state.range(0))];
  const std::vector<float> x(32 * 32 * 3, 0.5f);
  const CorruptionSpec spec{style, 3, 0, {32, 32, 3}};
  for (auto _ : state) benchmark::DoNotOptimize(apply_corruption(spec, x));
  state.SetLabel(std::string(style_name(style)));
}
BENCHMARK(BM_Corruption)->DenseRange(0, 6);

}  // namespace

BENCHMARK_MAIN();
