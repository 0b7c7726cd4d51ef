#include <benchmark/benchmark.h>

#include <vector>

#include "fairaudit/bias.h"
#include "fairaudit/datagen.h"
#include "fairaudit/metrics.h"
#include "fairaudit/model.h"
#include "fairaudit/random.h"

namespace fairaudit {
namespace {

PopulationSpec SizedSpec(std::int64_t n) {
  PopulationSpec spec;
  spec.n_group1 = std::max<std::int64_t>(n / 10, 50);
  spec.n_group0 = n - spec.n_group1;
  return spec;
}

void BM_GeneratePopulation(benchmark::State& state) {
  const PopulationSpec spec = SizedSpec(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(GeneratePopulation(spec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratePopulation)->Arg(10'000)->Arg(43'331)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const auto pop = GeneratePopulation(SizedSpec(state.range(0)));
  const auto data = BuildDataset(pop, BiasSpec{true, true}, 7);
  const ModelParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fit(data, params));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_Fit)->Arg(10'000)->Arg(43'331)->Unit(benchmark::kMillisecond);

void BM_Audit(benchmark::State& state) {
  Rng rng(3);
  std::vector<Outcome> data(static_cast<std::size_t>(state.range(0)));
  for (Outcome& o : data) {
    o.group = rng.Bernoulli(0.3) ? Group::kProtected : Group::kReference;
    o.label = rng.Bernoulli(0.5);
    o.score_hat = rng.Uniform();
    o.label_hat = o.score_hat >= 0.5;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(Audit(data));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Audit)->Arg(1'000)->Arg(100'000);

}  // namespace
}  // namespace fairaudit

BENCHMARK_MAIN();
