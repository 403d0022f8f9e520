#pragma once

// Dataset recipe: train / validation / test composition, noise levels and
// deterministic per-scene seeding.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "muvsim/dataset_io.hpp"
#include "muvsim/muscle_model.hpp"
#include "muvsim/sequence_synth.hpp"

namespace muvsim {

struct SplitConfig {
  bool enabled = true;
  // Random-count splits: `count` scenes with unit counts uniform in [min_units, max_units].
  std::size_t count = 0;
  int min_units = 5;
  int max_units = 30;
  // Category splits (non-empty `categories`): `per_category` scenes per unit count.
  std::vector<int> categories;
  std::size_t per_category = 0;
  std::vector<double> noise_db{kNoiseFree};
};

struct GenerationConfig {
  std::uint64_t seed = 2021;
  GridSpec grid;
  MuscleConfig muscle;
  SplitConfig train{true, 10000, 5, 30, {}, 0, {kNoiseFree}};
  SplitConfig validation{true, 1000, 5, 30, {}, 0, {kNoiseFree}};
  SplitConfig test{true, 0, 0, 0, {1, 5, 10, 15, 20, 25}, 100, {10.0, 20.0, kNoiseFree}};
  bool keep_clean = false;
  bool allow_zero_signal = false;
};

/// Parses a JSON config; absent keys keep their defaults.
GenerationConfig config_from_json(const std::string& text);
std::string config_to_json(const GenerationConfig& config);
void validate_config(const GenerationConfig& config);

const SplitConfig& split_config(const GenerationConfig& config, Split split);

struct PlannedScene {
  std::uint64_t scene_index = 0;
  int n_units = 0;
};

/// Scene list of a split, in container order. Deterministic in (seed, config).
std::vector<PlannedScene> plan_split(const GenerationConfig& config, Split split);

/// The scene's own random stream; independent of every other scene.
Rng scene_rng(std::uint64_t seed, Split split, std::uint64_t scene_index);

MuscleScene make_scene(const GenerationConfig& config, Split split, const PlannedScene& plan);

/// One stored record per configured noise level, sharing one rendered scene.
std::vector<SequenceRecord> make_records(const GenerationConfig& config, Split split,
                                         const PlannedScene& plan);

struct SplitSummary {
  std::size_t sequences = 0;
  std::size_t records = 0;
  std::size_t units = 0;
  std::filesystem::path container;
};

struct GenerationSummary {
  std::map<Split, SplitSummary> splits;
  double seconds = 0.0;
};

/// Writes `<out_dir>/<split>.muvd` and sidecar for every enabled split.
GenerationSummary generate_dataset(const GenerationConfig& config,
                                   const std::filesystem::path& out_dir, unsigned threads = 0);

/// Worker count: `requested` if nonzero, else MUVSIM_THREADS, else hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

}  // namespace muvsim
