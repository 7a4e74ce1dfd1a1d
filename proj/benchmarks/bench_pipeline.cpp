#include <rblkit/rblkit.hpp>

#include <benchmark/benchmark.h>

using namespace rblkit;

namespace {

struct Fixture {
  Scenario sc = paper_table1(true);
  CrossDistanceMatrix d12 = simulate_ranges(sc, 0.01, 7);
  ConnectivityMask full = ConnectivityMask::ones(12, 10);
  ConnectivityMask partial = connectivity_mask(12, 10, 6);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

void BM_ClassicalMds(benchmark::State& state) {
  const auto& f = fx();
  const FullEdm d = full_edm(stack_scenario(f.sc.c1, f.sc.c2, f.sc.pose2), 12);
  for (auto _ : state) benchmark::DoNotOptimize(classical_mds(d));
}
BENCHMARK(BM_ClassicalMds);

void BM_EmbedTarget(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state) benchmark::DoNotOptimize(embed_target(f.sc.c1, f.d12));
}
BENCHMARK(BM_EmbedTarget);

void BM_TranslationMds(benchmark::State& state) {
  const auto& f = fx();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_translation_mds(f.sc.c1, f.d12, f.full));
}
BENCHMARK(BM_TranslationMds);

void BM_TranslationRobust(benchmark::State& state) {
  const auto& f = fx();
  const double eps = noise_epsilon(f.d12, f.full, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_translation_robust(f.sc.c1, f.d12, f.full, eps));
}
BENCHMARK(BM_TranslationRobust);

void BM_RotationEgo(benchmark::State& state) {
  const auto& f = fx();
  const auto emb = embed_target(f.sc.c1, f.d12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_rotation_ego(f.sc.c1, f.d12, f.full, emb.estimate.s2_aligned));
  }
}
BENCHMARK(BM_RotationEgo);

void BM_AnchoredCompletion(benchmark::State& state) {
  const auto& f = fx();
  const auto masked = apply_mask(f.d12, f.partial);
  for (auto _ : state) benchmark::DoNotOptimize(complete_cross_block_anchored(f.sc.c1, masked, f.partial));
}
BENCHMARK(BM_AnchoredCompletion);

void BM_LowRankCompletion(benchmark::State& state) {
  const auto& f = fx();
  const auto masked = apply_mask(f.d12, f.partial);
  CompletionOptions opts;
  opts.method = CompletionMethod::kLowRank;
  for (auto _ : state) benchmark::DoNotOptimize(complete_cross_block(masked, f.partial, opts));
}
BENCHMARK(BM_LowRankCompletion);

void BM_Trial(benchmark::State& state) {
  ExperimentConfig cfg{.scenario = paper_table1(true)};
  const auto method = static_cast<Method>(state.range(0));
  std::size_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(cfg, 0.05, 10, method, index++));
  state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_Trial)->DenseRange(0, 3);

}  // namespace

BENCHMARK_MAIN();
