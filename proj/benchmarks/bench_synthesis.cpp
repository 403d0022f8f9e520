#include <benchmark/benchmark.h>

#include "muvsim/generation.hpp"
#include "muvsim/muscle_model.hpp"
#include "muvsim/sequence_synth.hpp"

using namespace muvsim;

namespace {

MuscleScene scene_with(int units) {
  const GenerationConfig c;
  return make_scene(c, Split::test, {0, units});
}

void BM_FiringTrain(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_firing_train(rng, {8.0, 13.0}, 1.0));
}
BENCHMARK(BM_FiringTrain);

void BM_BuildScene(benchmark::State& state) {
  Rng rng(2);
  const int units = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_scene(rng, units));
}
BENCHMARK(BM_BuildScene)->Arg(1)->Arg(25);

void BM_RenderScene(benchmark::State& state) {
  const MuscleScene scene = scene_with(static_cast<int>(state.range(0)));
  const GridSpec grid;
  for (auto _ : state) benchmark::DoNotOptimize(render_scene(scene, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.voxels()));
}
BENCHMARK(BM_RenderScene)->Arg(1)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_AddNoise(benchmark::State& state) {
  const VelocitySequence clean = render_scene(scene_with(10), GridSpec{}).sequence;
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(add_noise(clean, 20.0, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(clean.size()));
}
BENCHMARK(BM_AddNoise)->Unit(benchmark::kMillisecond);

void BM_MakeRecords(benchmark::State& state) {
  const GenerationConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(make_records(c, Split::test, {0, 15}));
}
BENCHMARK(BM_MakeRecords)->Unit(benchmark::kMillisecond);

}  // namespace
