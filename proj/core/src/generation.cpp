#include "muvsim/generation.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <set>
#include <thread>

#include "json_codec.hpp"
#include "muvsim/errors.hpp"

namespace muvsim {

namespace {

using detail::Json;

std::uint64_t split_tag(Split split) {
  switch (split) {
    case Split::train: return 1;
    case Split::validation: return 2;
    case Split::test: return 3;
  }
  return 0;
}

std::uint64_t noise_tag(double snr_db) { return 0x4e01'5e00'0000'0000ULL ^ std::bit_cast<std::uint64_t>(snr_db); }

Range range_from(const Json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw ParameterError(std::string(key) + " must be [lo, hi]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

Json range_to(Range r) { return Json::array({r.lo, r.hi}); }

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ParameterError(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

void read_split(const Json& j, SplitConfig& s, const char* name) {
  reject_unknown(j, {"enabled", "count", "units", "categories", "per_category", "noise_db"}, name);
  if (j.contains("enabled")) s.enabled = j.at("enabled").get<bool>();
  if (j.contains("count")) s.count = j.at("count").get<std::size_t>();
  if (j.contains("units")) {
    const Range r = range_from(j.at("units"), "units");
    s.min_units = static_cast<int>(r.lo);
    s.max_units = static_cast<int>(r.hi);
  }
  if (j.contains("categories")) s.categories = j.at("categories").get<std::vector<int>>();
  if (j.contains("per_category")) s.per_category = j.at("per_category").get<std::size_t>();
  if (j.contains("noise_db")) {
    s.noise_db.clear();
    for (const auto& db : j.at("noise_db")) s.noise_db.push_back(detail::db_from_json(db));
  }
}

Json write_split(const SplitConfig& s) {
  Json j;
  j["enabled"] = s.enabled;
  if (s.categories.empty()) {
    j["count"] = s.count;
    j["units"] = Json::array({s.min_units, s.max_units});
  } else {
    j["categories"] = s.categories;
    j["per_category"] = s.per_category;
  }
  Json levels = Json::array();
  for (const double db : s.noise_db) levels.push_back(detail::db_to_json(db));
  j["noise_db"] = std::move(levels);
  return j;
}

}  // namespace

GenerationConfig config_from_json(const std::string& text) {
  GenerationConfig c;
  try {
    const Json doc = Json::parse(text);
    reject_unknown(doc, {"seed", "grid", "muscle", "splits", "keep_clean", "allow_zero_signal"},
                   "config");
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      reject_unknown(g, {"width_px", "height_px", "px_mm", "frames", "frame_rate_hz"}, "grid");
      if (g.contains("width_px")) c.grid.width_px = g.at("width_px").get<int>();
      if (g.contains("height_px")) c.grid.height_px = g.at("height_px").get<int>();
      if (g.contains("px_mm")) c.grid.px_mm = g.at("px_mm").get<double>();
      if (g.contains("frames")) c.grid.frames = g.at("frames").get<int>();
      if (g.contains("frame_rate_hz")) c.grid.frame_rate_hz = g.at("frame_rate_hz").get<double>();
    }
    if (doc.contains("muscle")) {
      const auto& m = doc.at("muscle");
      reject_unknown(m,
                     {"firing_rate_hz", "ipi_cv", "refractory_s", "diameter_mm",
                      "peak_displacement", "amplitude_mode", "contraction_time_s",
                      "sync_fraction", "sync_jitter_s"},
                     "muscle");
      auto& mc = c.muscle;
      if (m.contains("firing_rate_hz")) mc.firing_rate_hz = range_from(m.at("firing_rate_hz"), "firing_rate_hz");
      if (m.contains("ipi_cv")) mc.firing.ipi_cv = m.at("ipi_cv").get<double>();
      if (m.contains("refractory_s")) mc.firing.refractory_s = m.at("refractory_s").get<double>();
      if (m.contains("diameter_mm")) mc.diameter_mm = range_from(m.at("diameter_mm"), "diameter_mm");
      if (m.contains("peak_displacement")) {
        mc.peak_displacement = range_from(m.at("peak_displacement"), "peak_displacement");
      }
      if (m.contains("amplitude_mode")) {
        const auto mode = m.at("amplitude_mode").get<std::string>();
        if (mode == "uniform") {
          mc.amplitude_mode = AmplitudeMode::uniform;
        } else if (mode == "size_principle") {
          mc.amplitude_mode = AmplitudeMode::size_principle;
        } else {
          throw ParameterError("amplitude_mode must be 'uniform' or 'size_principle'");
        }
      }
      if (m.contains("contraction_time_s")) {
        mc.contraction_time_s = range_from(m.at("contraction_time_s"), "contraction_time_s");
      }
      if (m.contains("sync_fraction")) mc.sync_fraction = range_from(m.at("sync_fraction"), "sync_fraction");
      if (m.contains("sync_jitter_s")) mc.sync_jitter_s = m.at("sync_jitter_s").get<double>();
    }
    if (doc.contains("splits")) {
      const auto& s = doc.at("splits");
      reject_unknown(s, {"train", "validation", "test"}, "splits");
      if (s.contains("train")) read_split(s.at("train"), c.train, "train");
      if (s.contains("validation")) read_split(s.at("validation"), c.validation, "validation");
      if (s.contains("test")) read_split(s.at("test"), c.test, "test");
    }
    if (doc.contains("keep_clean")) c.keep_clean = doc.at("keep_clean").get<bool>();
    if (doc.contains("allow_zero_signal")) c.allow_zero_signal = doc.at("allow_zero_signal").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("invalid config: ") + e.what());
  }
  validate_config(c);
  return c;
}

std::string config_to_json(const GenerationConfig& c) {
  Json doc;
  doc["seed"] = c.seed;
  doc["grid"] = {{"width_px", c.grid.width_px},   {"height_px", c.grid.height_px},
                 {"px_mm", c.grid.px_mm},         {"frames", c.grid.frames},
                 {"frame_rate_hz", c.grid.frame_rate_hz}};
  const auto& m = c.muscle;
  doc["muscle"] = {
      {"firing_rate_hz", range_to(m.firing_rate_hz)},
      {"ipi_cv", m.firing.ipi_cv},
      {"refractory_s", m.firing.refractory_s},
      {"diameter_mm", range_to(m.diameter_mm)},
      {"peak_displacement", range_to(m.peak_displacement)},
      {"amplitude_mode", m.amplitude_mode == AmplitudeMode::uniform ? "uniform" : "size_principle"},
      {"contraction_time_s", range_to(m.contraction_time_s)},
      {"sync_fraction", range_to(m.sync_fraction)},
      {"sync_jitter_s", m.sync_jitter_s}};
  doc["splits"] = {{"train", write_split(c.train)},
                   {"validation", write_split(c.validation)},
                   {"test", write_split(c.test)}};
  doc["keep_clean"] = c.keep_clean;
  doc["allow_zero_signal"] = c.allow_zero_signal;
  return doc.dump(2);
}

void validate_config(const GenerationConfig& c) {
  validate_grid(c.grid);
  for (const Split split : {Split::train, Split::validation, Split::test}) {
    const SplitConfig& s = split_config(c, split);
    if (!s.enabled) continue;
    const std::string name = to_string(split);
    if (s.noise_db.empty()) throw ParameterError(name + ": at least one noise level is required");
    std::set<double> seen;
    for (const double db : s.noise_db) {
      if (std::isnan(db) || db <= 0.0) throw ParameterError(name + ": noise levels must be > 0 dB or inf");
      if (!seen.insert(db).second) throw ParameterError(name + ": duplicate noise level");
    }
    if (s.categories.empty()) {
      if (s.min_units < 1 || s.max_units < s.min_units) {
        throw ParameterError(name + ": unit range must satisfy 1 <= min <= max");
      }
    } else {
      for (const int n : s.categories) {
        if (n < 1) throw ParameterError(name + ": categories need at least one unit");
      }
    }
  }
}

const SplitConfig& split_config(const GenerationConfig& config, Split split) {
  switch (split) {
    case Split::train: return config.train;
    case Split::validation: return config.validation;
    case Split::test: return config.test;
  }
  return config.test;
}

Rng scene_rng(std::uint64_t seed, Split split, std::uint64_t scene_index) {
  return Rng(seed, (split_tag(split) << 48) | scene_index);
}

std::vector<PlannedScene> plan_split(const GenerationConfig& config, Split split) {
  const SplitConfig& s = split_config(config, split);
  std::vector<PlannedScene> plan;
  if (!s.enabled) return plan;
  if (!s.categories.empty()) {
    std::uint64_t index = 0;
    for (const int n : s.categories) {
      for (std::size_t k = 0; k < s.per_category; ++k) plan.push_back({index++, n});
    }
    return plan;
  }
  plan.reserve(s.count);
  for (std::uint64_t i = 0; i < s.count; ++i) {
    Rng count_rng = scene_rng(config.seed, split, i).fork(0);
    plan.push_back({i, sample_unit_count(count_rng, s.min_units, s.max_units)});
  }
  return plan;
}

MuscleScene make_scene(const GenerationConfig& config, Split split, const PlannedScene& plan) {
  MuscleConfig muscle = config.muscle;
  muscle.fov_width_mm = config.grid.fov_width_mm();
  muscle.fov_height_mm = config.grid.fov_height_mm();
  muscle.duration_s = config.grid.duration_s();
  Rng rng = scene_rng(config.seed, split, plan.scene_index).fork(1);
  return build_scene(rng, plan.n_units, muscle);
}

std::vector<SequenceRecord> make_records(const GenerationConfig& config, Split split,
                                         const PlannedScene& plan) {
  const SplitConfig& s = split_config(config, split);
  MuscleScene scene = make_scene(config, split, plan);
  RenderedScene rendered = render_scene(scene, config.grid);
  const double power = signal_power(rendered.sequence);
  const Rng base = scene_rng(config.seed, split, plan.scene_index);

  std::vector<SequenceRecord> records;
  records.reserve(s.noise_db.size());
  for (const double db : s.noise_db) {
    Rng noise_rng = base.fork(noise_tag(db));
    SequenceRecord rec;
    rec.scene_index = plan.scene_index;
    rec.snr_db = db;
    rec.signal_power = power;
    rec.sequence = to_stored(add_noise(rendered.sequence, db, noise_rng,
                                       NoiseOptions{config.allow_zero_signal}));
    if (config.keep_clean) rec.clean = to_stored(rendered.sequence);
    rec.truths = rendered.truths;
    rec.scene = scene;
    records.push_back(std::move(rec));
  }
  return records;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MUVSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw ParameterError("MUVSIM_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

GenerationSummary generate_dataset(const GenerationConfig& config,
                                   const std::filesystem::path& out_dir, unsigned threads) {
  validate_config(config);
  const unsigned workers = resolve_threads(threads);
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  GenerationSummary summary;
  for (const Split split : {Split::train, Split::validation, Split::test}) {
    const SplitConfig& s = split_config(config, split);
    if (!s.enabled) continue;
    const auto plan = plan_split(config, split);

    DatasetManifest manifest;
    manifest.split = split;
    manifest.sequence_count = plan.size();
    manifest.record_count = plan.size() * s.noise_db.size();
    manifest.grid = config.grid;
    manifest.noise_levels_db = s.noise_db;
    manifest.seed = config.seed;
    manifest.config_json = config_to_json(config);
    for (const auto& p : plan) ++manifest.category_histogram[p.n_units];

    SplitSummary& out = summary.splits[split];
    out.container = out_dir / (to_string(split) + ".muvd");
    out.sequences = plan.size();
    ContainerWriter writer(out.container, config.grid, ContainerKind::dataset,
                           manifest.record_count, manifest_to_json(manifest));
    std::vector<RecordSummary> record_meta;
    std::map<std::uint64_t, MuscleScene> scenes;

    for (std::size_t begin = 0; begin < plan.size(); begin += workers) {
      const std::size_t end = std::min(plan.size(), begin + workers);
      std::vector<std::future<std::vector<SequenceRecord>>> batch;
      for (std::size_t i = begin; i < end; ++i) {
        batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                   [&config, split, p = plan[i]] { return make_records(config, split, p); }));
      }
      for (auto& f : batch) {
        for (const auto& rec : f.get()) {
          writer.append(rec);
          record_meta.push_back({rec.scene_index, rec.snr_db, rec.signal_power, rec.truths.size()});
          ++out.records;
          out.units += rec.truths.size();
          scenes.emplace(rec.scene_index, rec.scene);
        }
      }
    }
    writer.finalize();
    write_sidecar(out.container, manifest, record_meta, scenes);
  }
  summary.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

}  // namespace muvsim
