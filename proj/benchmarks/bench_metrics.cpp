#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "muvsim/evaluation.hpp"
#include "muvsim/generation.hpp"
#include "muvsim/metrics.hpp"

using namespace muvsim;

namespace {

std::vector<double> noisy_signal(int frames) {
  Rng rng(5);
  std::vector<double> s(static_cast<std::size_t>(frames));
  for (auto& x : s) x = rng.normal();
  return s;
}

void BM_ExtractFirings(benchmark::State& state) {
  const auto s = noisy_signal(400);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::extract_firings(s));
}
BENCHMARK(BM_ExtractFirings);

void BM_MatchFirings(benchmark::State& state) {
  Rng rng(6);
  std::vector<int> a, b;
  for (int k = 0; k < 12; ++k) {
    a.push_back(k * 33 + static_cast<int>(rng.uniform_int(0, 5)));
    b.push_back(k * 33 + static_cast<int>(rng.uniform_int(0, 9)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(metrics::match_firings(a, b));
}
BENCHMARK(BM_MatchFirings);

void BM_MatchDetections(benchmark::State& state) {
  const GenerationConfig c;
  const int units = static_cast<int>(state.range(0));
  const auto scene = make_scene(c, Split::test, {0, units});
  std::vector<TerritoryMask> truths;
  std::vector<metrics::ScoredMask> preds;
  for (const auto& u : scene.units) {
    truths.push_back(rasterize_territory(u.center, u.diameter_mm, c.grid));
    preds.push_back({u.id, rasterize_territory({u.center.x_mm + 0.5, u.center.y_mm}, u.diameter_mm, c.grid),
                     1.0 / (1 + u.id)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(metrics::match_detections(preds, truths));
}
BENCHMARK(BM_MatchDetections)->Arg(5)->Arg(25);

void BM_ScoreSequence(benchmark::State& state) {
  const GenerationConfig c;
  const auto rec = make_records(c, Split::test, {0, 25}).back();
  const auto pred = truth_as_prediction(rec, 0);
  for (auto _ : state) benchmark::DoNotOptimize(score_sequence(rec, pred));
}
BENCHMARK(BM_ScoreSequence)->Unit(benchmark::kMicrosecond);

}  // namespace
