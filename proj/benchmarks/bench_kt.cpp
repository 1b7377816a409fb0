#include <benchmark/benchmark.h>

#include "kt/learning.hpp"
#include "kt/mapping.hpp"
#include "kt/sampling.hpp"
#include "kt/synthetic.hpp"

namespace {

kt::SyntheticTask task() {
  kt::SyntheticSpec spec;
  spec.seed = 42;
  spec.n_attributes = 4;
  spec.n_bins = 4;
  spec.mapping_noise = 0.1;
  spec.n_source_train = 500;
  spec.n_target_train = 500;
  static const kt::SyntheticTask t = kt::make_synthetic_task(spec);
  return t;
}

void BM_GibbsSweep(benchmark::State& state) {
  const kt::SyntheticTask t = task();
  kt::SamplerConfig cfg;
  cfg.n_samples = static_cast<std::uint64_t>(state.range(0));
  cfg.burn_in = 100;
  cfg.thin = 1;
  cfg.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kt::gibbs_sample(t.source_model, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GibbsSweep)->Arg(100)->Arg(1000);

void BM_BuildJointModel(benchmark::State& state) {
  const kt::SyntheticTask t = task();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kt::build_joint_model(t.source_model, t.mapping,
                              kt::ZeroPolicy::kClampRenormalize));
  }
}
BENCHMARK(BM_BuildJointModel);

void BM_PllObjective(benchmark::State& state) {
  const kt::SyntheticTask t = task();
  kt::Structure st;
  st.features = t.manual_structure.features;
  std::vector<double> w(st.size(), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kt::pll_objective(st, w, t.target_train, 1.0));
  }
  state.SetItemsProcessed(state.iterations() *
                          t.target_train.instances.size());
}
BENCHMARK(BM_PllObjective);

void BM_PllGradient(benchmark::State& state) {
  const kt::SyntheticTask t = task();
  kt::Structure st;
  st.features = t.manual_structure.features;
  std::vector<double> w(st.size(), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kt::pll_gradient(st, w, t.target_train, 1.0));
  }
  state.SetItemsProcessed(state.iterations() *
                          t.target_train.instances.size());
}
BENCHMARK(BM_PllGradient);

void BM_TranslateDataset(benchmark::State& state) {
  const kt::SyntheticTask t = task();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kt::translate_dataset(t.mapping, t.source_train, 500, 3));
  }
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_TranslateDataset);

}  // namespace

BENCHMARK_MAIN();
