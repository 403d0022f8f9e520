#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>

#include <unistd.h>

#include "muvsim/dataset_io.hpp"
#include "muvsim/generation.hpp"

using namespace muvsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  return fs::temp_directory_path() / ("muvsim_bench_" + std::to_string(::getpid()) + "_" + name);
}

DatasetManifest manifest(const GenerationConfig& c, std::size_t records) {
  DatasetManifest m;
  m.sequence_count = 1;
  m.record_count = records;
  m.grid = c.grid;
  m.noise_levels_db = c.test.noise_db;
  m.seed = c.seed;
  m.config_json = config_to_json(c);
  return m;
}

void BM_WriteDataset(benchmark::State& state) {
  const GenerationConfig c;
  const auto records = make_records(c, Split::test, {0, 10});
  const fs::path p = scratch("w.muvd");
  for (auto _ : state) write_dataset(records, p, manifest(c, records.size()));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(fs::file_size(p)));
  fs::remove(p);
  fs::remove(sidecar_path(p));
}
BENCHMARK(BM_WriteDataset)->Unit(benchmark::kMillisecond);

void BM_ReadRecord(benchmark::State& state) {
  const GenerationConfig c;
  const auto records = make_records(c, Split::test, {0, 10});
  const fs::path p = scratch("r.muvd");
  write_dataset(records, p, manifest(c, records.size()));
  const ContainerReader reader(p);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(reader.read_record(i++ % reader.size()));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(fs::file_size(p) / reader.size()));
  fs::remove(p);
  fs::remove(sidecar_path(p));
}
BENCHMARK(BM_ReadRecord)->Unit(benchmark::kMillisecond);

}  // namespace
