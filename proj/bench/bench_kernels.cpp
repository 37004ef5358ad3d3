#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "fusekit/fusion.hpp"
#include "fusekit/kernels.hpp"
#include "fusekit/simulator.hpp"

namespace {

namespace k = fusekit::kernels;

struct Panel {
  std::vector<double> matrix;
  std::vector<std::uint8_t> truth;
  std::size_t models = 0;
  std::size_t samples = 0;
};

// Simulated panel with three models, scaled by the benchmark argument.
const Panel& panel_of(std::int64_t samples) {
  static std::map<std::int64_t, Panel> cache;
  auto [it, inserted] = cache.try_emplace(samples);
  if (inserted) {
    fusekit::SimSpec spec;
    spec.n_class0 = samples * 372 / 1187;
    spec.n_class1 = samples - spec.n_class0;
    spec.models = {{"a", 0.96, 0.98, 4.0}, {"b", 0.96, 0.97, 3.0}, {"c", 0.94, 0.95, 2.0}};
    spec.error_overlap = 0.2;
    spec.seed = 1;
    const auto bundle = fusekit::simulate(spec);
    const auto aligned = fusekit::align(bundle.labels, bundle.models);
    auto& p = it->second;
    p.matrix.assign(aligned.score_matrix().begin(), aligned.score_matrix().end());
    p.truth.assign(aligned.truth().begin(), aligned.truth().end());
    p.models = aligned.model_count();
    p.samples = aligned.sample_count();
  }
  return it->second;
}

const std::vector<double> kWeights = {0.9755, 0.9663, 0.9455};

template <auto Fn>
void weighted(benchmark::State& state) {
  const auto& p = panel_of(state.range(0));
  std::vector<double> out(p.samples);
  for (auto _ : state) {
    Fn(p.matrix, p.models, kWeights, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.samples));
}

template <auto Fn>
void mean(benchmark::State& state) {
  const auto& p = panel_of(state.range(0));
  std::vector<double> out(p.samples);
  for (auto _ : state) {
    Fn(p.matrix, p.models, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.samples));
}

template <auto Fn>
void majority(benchmark::State& state) {
  const auto& p = panel_of(state.range(0));
  std::vector<std::uint8_t> out(p.samples);
  for (auto _ : state) {
    Fn(p.matrix, p.models, 0.5, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.samples));
}

template <auto Fn>
void confusion(benchmark::State& state) {
  const auto& p = panel_of(state.range(0));
  std::vector<std::uint8_t> decided(p.samples);
  k::serial::threshold_column(p.matrix, p.models, 0, 0.5, decided);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(p.truth, decided));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.samples));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (std::int64_t n : {1187, 100'000, 2'000'000}) b->Arg(n);
}

}  // namespace

BENCHMARK(weighted<k::serial::weighted_rows>)->Name("weighted_rows/serial")->Apply(sizes);
BENCHMARK(weighted<k::weighted_rows>)->Name("weighted_rows/openmp")->Apply(sizes)->UseRealTime();
BENCHMARK(mean<k::serial::mean_rows>)->Name("mean_rows/serial")->Apply(sizes);
BENCHMARK(mean<k::mean_rows>)->Name("mean_rows/openmp")->Apply(sizes)->UseRealTime();
BENCHMARK(majority<k::serial::majority_rows>)->Name("majority_rows/serial")->Apply(sizes);
BENCHMARK(majority<k::majority_rows>)->Name("majority_rows/openmp")->Apply(sizes)->UseRealTime();
BENCHMARK(confusion<k::serial::count_confusion>)->Name("count_confusion/serial")->Apply(sizes);
BENCHMARK(confusion<k::count_confusion>)->Name("count_confusion/openmp")->Apply(sizes)->UseRealTime();

BENCHMARK_MAIN();
