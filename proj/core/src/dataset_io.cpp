#include "muvsim/dataset_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "byte_codec.hpp"
#include "json_codec.hpp"
#include "muvsim/errors.hpp"

namespace muvsim {

namespace {

using detail::ByteReader;
using detail::ByteWriter;
using detail::Json;

constexpr std::array<char, 4> kMagic{'M', 'U', 'V', 'D'};
constexpr std::size_t kHeaderSize = 64;
constexpr std::size_t kEntrySize = 32;
constexpr std::uint8_t kLittleEndian = 1;
constexpr std::uint8_t kFloat32 = 1;

std::uint32_t crc_update(std::uint32_t crc, const std::uint8_t* data, std::size_t len) {
  // zlib takes uInt lengths; feed large buffers in chunks.
  while (len > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(len, 1u << 30));
    crc = static_cast<std::uint32_t>(::crc32(crc, data, chunk));
    data += chunk;
    len -= chunk;
  }
  return crc;
}

std::uint32_t crc_of(const std::vector<std::uint8_t>& bytes) {
  return crc_update(static_cast<std::uint32_t>(::crc32(0L, Z_NULL, 0)), bytes.data(), bytes.size());
}

std::size_t mask_bytes(const GridSpec& grid) { return (grid.pixels() + 7) / 8; }

void pack_mask(ByteWriter& w, const TerritoryMask& mask, const GridSpec& grid) {
  if (mask.width() != grid.width_px || mask.height() != grid.height_px) {
    throw FormatError("mask grid does not match the container grid");
  }
  std::vector<std::uint8_t> packed(mask_bytes(grid), 0);
  const auto& cells = mask.cells();
  for (std::size_t p = 0; p < cells.size(); ++p) {
    if (cells[p]) packed[p / 8] |= static_cast<std::uint8_t>(1u << (p % 8));
  }
  w.raw(packed);
}

TerritoryMask unpack_mask(ByteReader& r, const GridSpec& grid) {
  const auto packed = r.raw(mask_bytes(grid));
  TerritoryMask mask(grid.width_px, grid.height_px);
  for (int i = 0; i < grid.height_px; ++i) {
    for (int j = 0; j < grid.width_px; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * grid.width_px + j;
      if (packed[p / 8] & (1u << (p % 8))) mask.set(i, j);
    }
  }
  return mask;
}

void write_signal(ByteWriter& w, const std::vector<float>& signal, const GridSpec& grid) {
  if (signal.size() != static_cast<std::size_t>(grid.frames)) {
    throw FormatError("signal length does not match the container frame count");
  }
  w.f32_array(signal);
}

std::vector<float> read_signal(ByteReader& r, const GridSpec& grid) {
  std::vector<float> s(static_cast<std::size_t>(grid.frames));
  r.f32_array(s);
  return s;
}

void write_times(ByteWriter& w, const std::vector<double>& times) {
  w.u32(static_cast<std::uint32_t>(times.size()));
  w.f64_array(times);
}

std::vector<double> read_times(ByteReader& r) {
  std::vector<double> t(r.count(8));
  for (double& v : t) v = r.f64();
  return t;
}

void write_scene(ByteWriter& w, const MuscleScene& scene) {
  w.f64(scene.fov_width_mm);
  w.f64(scene.fov_height_mm);
  w.f64(scene.duration_s);
  w.f64(scene.sync_fraction);
  w.u32(static_cast<std::uint32_t>(scene.units.size()));
  for (const auto& u : scene.units) {
    w.i32(u.id);
    w.f64(u.center.x_mm);
    w.f64(u.center.y_mm);
    w.f64(u.diameter_mm);
    w.f64(u.twitch.peak_displacement);
    w.f64(u.twitch.contraction_time_s);
    w.f64(u.firing.nominal_rate_hz);
    write_times(w, u.firing.times_s);
  }
}

MuscleScene read_scene(ByteReader& r) {
  MuscleScene scene;
  scene.fov_width_mm = r.f64();
  scene.fov_height_mm = r.f64();
  scene.duration_s = r.f64();
  scene.sync_fraction = r.f64();
  const std::size_t n = r.count(56);
  scene.units.resize(n);
  for (auto& u : scene.units) {
    u.id = r.i32();
    u.center.x_mm = r.f64();
    u.center.y_mm = r.f64();
    u.diameter_mm = r.f64();
    u.twitch.peak_displacement = r.f64();
    u.twitch.contraction_time_s = r.f64();
    u.firing.nominal_rate_hz = r.f64();
    u.firing.times_s = read_times(r);
  }
  return scene;
}

void check_grid(const GridSpec& grid, const GridSpec& expected) {
  if (!(grid == expected)) throw FormatError("record grid does not match the container grid");
}

std::vector<std::uint8_t> encode_header(const GridSpec& grid, ContainerKind kind,
                                        std::uint64_t record_count, std::uint32_t meta_len,
                                        bool finalized, std::uint32_t crc,
                                        std::uint64_t data_end) {
  ByteWriter w;
  for (const char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(kFormatVersion);
  w.u8(kLittleEndian);
  w.u8(kFloat32);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u8(finalized ? 1 : 0);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(grid.width_px));
  w.u32(static_cast<std::uint32_t>(grid.height_px));
  w.u32(static_cast<std::uint32_t>(grid.frames));
  w.f64(grid.px_mm);
  w.f64(grid.frame_rate_hz);
  w.u64(record_count);
  w.u32(meta_len);
  w.u32(crc);
  w.u64(data_end);
  return std::move(w.bytes());
}

// CRC over the header (minus its CRC field), metadata and offset table.
std::uint32_t header_crc(const std::vector<std::uint8_t>& header, const std::string& metadata,
                         const std::vector<std::uint8_t>& table) {
  auto crc = static_cast<std::uint32_t>(::crc32(0L, Z_NULL, 0));
  crc = crc_update(crc, header.data(), 52);
  crc = crc_update(crc, header.data() + 56, 8);
  crc = crc_update(crc, reinterpret_cast<const std::uint8_t*>(metadata.data()), metadata.size());
  return crc_update(crc, table.data(), table.size());
}

}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "test";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "validation") return Split::validation;
  if (name == "test") return Split::test;
  throw ParameterError("unknown split '" + name + "'");
}

// ---------------------------------------------------------------------------
// Writer

ContainerWriter::ContainerWriter(const std::filesystem::path& path, const GridSpec& grid,
                                 ContainerKind kind, std::uint64_t record_count,
                                 std::string metadata)
    : path_(path), grid_(grid), kind_(kind), record_count_(record_count),
      metadata_(std::move(metadata)) {
  validate_grid(grid);
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  const auto header = encode_header(grid_, kind_, record_count_,
                                    static_cast<std::uint32_t>(metadata_.size()), false, 0, 0);
  out_.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  out_.write(metadata_.data(), static_cast<std::streamsize>(metadata_.size()));
  const std::vector<char> table(record_count_ * kEntrySize, 0);
  out_.write(table.data(), static_cast<std::streamsize>(table.size()));
  if (!out_) throw IoError("write failed on '" + path.string() + "'");
  cursor_ = kHeaderSize + metadata_.size() + table.size();
  entries_.reserve(record_count_);
}

ContainerWriter::~ContainerWriter() = default;

void ContainerWriter::append_bytes(const std::vector<std::uint8_t>& labels,
                                   const std::vector<std::uint8_t>& frames) {
  if (finalized_) throw FormatError("container already finalized");
  if (written_ >= record_count_) throw FormatError("more records than declared");
  Entry e;
  e.offset = cursor_;
  e.labels_len = labels.size();
  e.frames_len = frames.size();
  e.labels_crc = crc_of(labels);
  e.frames_crc = crc_of(frames);
  out_.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
  out_.write(reinterpret_cast<const char*>(frames.data()), static_cast<std::streamsize>(frames.size()));
  if (!out_) throw IoError("write failed on '" + path_.string() + "'");
  cursor_ += labels.size() + frames.size();
  entries_.push_back(e);
  ++written_;
}

void ContainerWriter::append(const SequenceRecord& record) {
  if (kind_ != ContainerKind::dataset) throw FormatError("dataset record in a predictions container");
  check_grid(record.sequence.grid(), grid_);
  if (record.clean) check_grid(record.clean->grid(), grid_);
  if (record.truths.size() != record.scene.units.size()) {
    throw FormatError("ground-truth count differs from the scene unit count");
  }

  ByteWriter labels;
  labels.u64(record.scene_index);
  labels.f64(record.snr_db);
  labels.f64(record.signal_power);
  labels.u8(record.clean ? 1 : 0);
  write_scene(labels, record.scene);
  labels.u32(static_cast<std::uint32_t>(record.truths.size()));
  for (const auto& t : record.truths) {
    labels.i32(t.unit_id);
    pack_mask(labels, t.mask, grid_);
    write_signal(labels, t.signal, grid_);
    labels.f64(t.firing.nominal_rate_hz);
    write_times(labels, t.firing.times_s);
  }

  ByteWriter frames;
  frames.bytes().reserve(grid_.voxels() * 4 * (record.clean ? 2 : 1));
  frames.f32_array(record.sequence.data());
  if (record.clean) frames.f32_array(record.clean->data());
  append_bytes(labels.bytes(), frames.bytes());
}

void ContainerWriter::append(const PredictionRecord& record) {
  if (kind_ != ContainerKind::predictions) throw FormatError("prediction record in a dataset container");
  ByteWriter labels;
  labels.u64(record.sequence_index);
  labels.u32(static_cast<std::uint32_t>(record.units.size()));
  for (const auto& u : record.units) {
    labels.i32(u.id);
    labels.f32(u.score);
    pack_mask(labels, u.mask, grid_);
    write_signal(labels, u.signal, grid_);
  }
  append_bytes(labels.bytes(), {});
}

void ContainerWriter::finalize() {
  if (finalized_) return;
  if (written_ != record_count_) {
    throw FormatError("container declared " + std::to_string(record_count_) + " records but " +
                      std::to_string(written_) + " were written");
  }
  ByteWriter table;
  for (const auto& e : entries_) {
    table.u64(e.offset);
    table.u64(e.labels_len);
    table.u64(e.frames_len);
    table.u32(e.labels_crc);
    table.u32(e.frames_crc);
  }
  auto header = encode_header(grid_, kind_, record_count_,
                              static_cast<std::uint32_t>(metadata_.size()), true, 0, cursor_);
  const std::uint32_t crc = header_crc(header, metadata_, table.bytes());
  header = encode_header(grid_, kind_, record_count_, static_cast<std::uint32_t>(metadata_.size()),
                         true, crc, cursor_);

  out_.seekp(0);
  out_.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  out_.seekp(static_cast<std::streamoff>(kHeaderSize + metadata_.size()));
  out_.write(reinterpret_cast<const char*>(table.bytes().data()),
             static_cast<std::streamsize>(table.bytes().size()));
  out_.close();
  if (!out_) throw IoError("finalizing '" + path_.string() + "' failed");
  finalized_ = true;
}

// ---------------------------------------------------------------------------
// Reader

ContainerReader::ContainerReader(const std::filesystem::path& path) : path_(path) {
  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat '" + path.string() + "': " + ec.message());
  in_.open(path, std::ios::binary);
  if (!in_) throw IoError("cannot open '" + path.string() + "'");
  if (file_size < kHeaderSize) throw CorruptionError("file is shorter than the MUVD header");

  std::vector<std::uint8_t> header(kHeaderSize);
  in_.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(kHeaderSize));
  if (!in_) throw IoError("cannot read header of '" + path.string() + "'");
  if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("'" + path.string() + "' is not a MUVD container");
  }

  ByteReader r(std::span<const std::uint8_t>(header).subspan(4));
  const std::uint16_t version = r.u16();
  if (version != kFormatVersion) {
    throw FormatError("unsupported MUVD format version " + std::to_string(version) +
                      " (this build reads version " + std::to_string(kFormatVersion) + ")");
  }
  if (r.u8() != kLittleEndian) throw FormatError("unsupported byte order");
  if (r.u8() != kFloat32) throw FormatError("unsupported scalar type");
  const std::uint8_t kind = r.u8();
  const std::uint8_t finalized = r.u8();
  r.u16();
  grid_.width_px = static_cast<int>(r.u32());
  grid_.height_px = static_cast<int>(r.u32());
  grid_.frames = static_cast<int>(r.u32());
  grid_.px_mm = r.f64();
  grid_.frame_rate_hz = r.f64();
  const std::uint64_t record_count = r.u64();
  const std::uint32_t meta_len = r.u32();
  const std::uint32_t stored_crc = r.u32();
  const std::uint64_t data_end = r.u64();

  if (kind > 1) throw FormatError("unknown container kind " + std::to_string(kind));
  kind_ = static_cast<ContainerKind>(kind);
  if (!finalized) throw CorruptionError("container was never finalized");
  if (data_end != file_size) {
    throw CorruptionError("file size " + std::to_string(file_size) + " differs from recorded size " +
                          std::to_string(data_end) + " (truncated or extended)");
  }
  if (grid_.width_px <= 0 || grid_.height_px <= 0 || grid_.frames <= 0 ||
      !(grid_.px_mm > 0.0) || !(grid_.frame_rate_hz > 0.0)) {
    throw CorruptionError("header holds an invalid grid");
  }
  if (record_count > (file_size - kHeaderSize) / kEntrySize ||
      kHeaderSize + meta_len + record_count * kEntrySize > file_size) {
    throw CorruptionError("offset table extends past the end of the file");
  }

  metadata_.resize(meta_len);
  std::vector<std::uint8_t> table(record_count * kEntrySize);
  in_.read(metadata_.data(), static_cast<std::streamsize>(meta_len));
  in_.read(reinterpret_cast<char*>(table.data()), static_cast<std::streamsize>(table.size()));
  if (!in_) throw CorruptionError("cannot read metadata and offset table");
  if (header_crc(header, metadata_, table) != stored_crc) {
    throw CorruptionError("header checksum mismatch");
  }

  ByteReader t(table);
  std::uint64_t expected = kHeaderSize + meta_len + table.size();
  entries_.resize(record_count);
  for (auto& e : entries_) {
    e.offset = t.u64();
    e.labels_len = t.u64();
    e.frames_len = t.u64();
    e.labels_crc = t.u32();
    e.frames_crc = t.u32();
    if (e.offset != expected || e.labels_len > data_end || e.frames_len > data_end - e.labels_len ||
        e.offset > data_end - e.labels_len - e.frames_len) {
      throw CorruptionError("offset table is inconsistent");
    }
    expected = e.offset + e.labels_len + e.frames_len;
  }
  if (expected != data_end) throw CorruptionError("records do not fill the container");
}

const ContainerReader::Entry& ContainerReader::entry(std::size_t index) const {
  if (index >= entries_.size()) {
    throw ParameterError("record index " + std::to_string(index) + " out of range (" +
                         std::to_string(entries_.size()) + " records)");
  }
  return entries_[index];
}

std::vector<std::uint8_t> ContainerReader::read_section(std::uint64_t offset, std::uint64_t len,
                                                        std::uint32_t crc,
                                                        std::size_t index) const {
  std::vector<std::uint8_t> bytes(len);
  {
    std::lock_guard lock(mutex_);
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(len));
    if (!in_) throw CorruptionError("record " + std::to_string(index) + " cannot be read");
  }
  if (crc_of(bytes) != crc) {
    throw CorruptionError("record " + std::to_string(index) + " checksum mismatch");
  }
  return bytes;
}

SequenceRecord ContainerReader::read_dataset_record(std::size_t index, bool with_frames) const {
  if (kind_ != ContainerKind::dataset) throw FormatError("not a dataset container");
  const Entry& e = entry(index);
  const auto labels = read_section(e.offset, e.labels_len, e.labels_crc, index);

  SequenceRecord rec;
  ByteReader r(labels);
  rec.scene_index = r.u64();
  rec.snr_db = r.f64();
  rec.signal_power = r.f64();
  const bool has_clean = r.u8() != 0;
  rec.scene = read_scene(r);
  const std::size_t n_truths = r.count(mask_bytes(grid_) + 4 * grid_.frames);
  rec.truths.resize(n_truths);
  for (auto& t : rec.truths) {
    t.unit_id = r.i32();
    t.mask = unpack_mask(r, grid_);
    t.signal = read_signal(r, grid_);
    t.firing.nominal_rate_hz = r.f64();
    t.firing.times_s = read_times(r);
  }
  if (!r.done()) throw CorruptionError("record " + std::to_string(index) + " has trailing bytes");

  const std::uint64_t volume_bytes = grid_.voxels() * 4;
  const std::uint64_t expected_frames = volume_bytes * (has_clean ? 2 : 1);
  if (e.frames_len != expected_frames) {
    throw CorruptionError("record " + std::to_string(index) + " frame section has the wrong size");
  }
  if (!with_frames) return rec;

  const auto frames =
      read_section(e.offset + e.labels_len, e.frames_len, e.frames_crc, index);
  ByteReader f(frames);
  rec.sequence = StoredSequence(grid_);
  f.f32_array(rec.sequence.data());
  if (has_clean) {
    rec.clean = StoredSequence(grid_);
    f.f32_array(rec.clean->data());
  }
  return rec;
}

SequenceRecord ContainerReader::read_record(std::size_t index) const {
  return read_dataset_record(index, true);
}

SequenceRecord ContainerReader::read_labels(std::size_t index) const {
  return read_dataset_record(index, false);
}

PredictionRecord ContainerReader::read_prediction(std::size_t index) const {
  if (kind_ != ContainerKind::predictions) throw FormatError("not a predictions container");
  const Entry& e = entry(index);
  const auto labels = read_section(e.offset, e.labels_len, e.labels_crc, index);
  ByteReader r(labels);
  PredictionRecord rec;
  rec.sequence_index = r.u64();
  const std::size_t n = r.count(8 + mask_bytes(grid_) + 4 * grid_.frames);
  rec.units.resize(n);
  for (auto& u : rec.units) {
    u.id = r.i32();
    u.score = r.f32();
    u.mask = unpack_mask(r, grid_);
    u.signal = read_signal(r, grid_);
  }
  if (!r.done()) throw CorruptionError("record " + std::to_string(index) + " has trailing bytes");
  return rec;
}

SequenceRecord ContainerReader::read_augmented(std::size_t augmented_index) const {
  return augment_flip(read_record(augmented_index / 4), flip_mode_for(augmented_index));
}

// ---------------------------------------------------------------------------
// Whole-dataset helpers and sidecar

std::filesystem::path sidecar_path(const std::filesystem::path& container) {
  auto p = container;
  p += ".json";
  return p;
}

namespace {

Json manifest_document(const DatasetManifest& m) {
  Json doc;
  doc["split"] = to_string(m.split);
  doc["sequence_count"] = m.sequence_count;
  doc["record_count"] = m.record_count;
  doc["grid"] = {{"width_px", m.grid.width_px},   {"height_px", m.grid.height_px},
                 {"px_mm", m.grid.px_mm},         {"frames", m.grid.frames},
                 {"frame_rate_hz", m.grid.frame_rate_hz}};
  Json levels = Json::array();
  for (const double db : m.noise_levels_db) levels.push_back(detail::db_to_json(db));
  doc["noise_levels_db"] = std::move(levels);
  doc["seed"] = m.seed;
  doc["format_version"] = m.format_version;
  Json hist = Json::object();
  for (const auto& [units, count] : m.category_histogram) hist[std::to_string(units)] = count;
  doc["category_histogram"] = std::move(hist);
  doc["snr_reference"] = "mean square of the clean sequence over all voxels";
  doc["scalar"] = "float32";
  doc["endianness"] = "little";
  if (!m.config_json.empty()) {
    doc["config"] = Json::parse(m.config_json);
  }
  return doc;
}

DatasetManifest manifest_from_document(const Json& doc) {
  DatasetManifest m;
  m.split = split_from_string(doc.at("split").get<std::string>());
  m.sequence_count = doc.at("sequence_count").get<std::size_t>();
  m.record_count = doc.at("record_count").get<std::size_t>();
  const auto& g = doc.at("grid");
  m.grid.width_px = g.at("width_px").get<int>();
  m.grid.height_px = g.at("height_px").get<int>();
  m.grid.px_mm = g.at("px_mm").get<double>();
  m.grid.frames = g.at("frames").get<int>();
  m.grid.frame_rate_hz = g.at("frame_rate_hz").get<double>();
  for (const auto& db : doc.at("noise_levels_db")) m.noise_levels_db.push_back(detail::db_from_json(db));
  m.seed = doc.at("seed").get<std::uint64_t>();
  m.format_version = doc.at("format_version").get<std::uint32_t>();
  for (const auto& [key, value] : doc.at("category_histogram").items()) {
    m.category_histogram[std::stoi(key)] = value.get<std::size_t>();
  }
  if (doc.contains("config")) m.config_json = doc.at("config").dump();
  return m;
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& manifest) {
  return manifest_document(manifest).dump();
}

void write_sidecar(const std::filesystem::path& container, const DatasetManifest& manifest,
                   const std::vector<RecordSummary>& records,
                   const std::map<std::uint64_t, MuscleScene>& scenes) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["manifest"] = manifest_document(manifest);
  Json recs = Json::array();
  for (const auto& r : records) {
    recs.push_back({{"scene_index", r.scene_index},
                    {"snr_db", detail::db_to_json(r.snr_db)},
                    {"signal_power", r.signal_power},
                    {"n_units", r.n_units}});
  }
  doc["records"] = std::move(recs);
  Json sc = Json::array();
  for (const auto& [index, scene] : scenes) {
    Json s;
    s["scene_index"] = index;
    s["scene"] = detail::scene_to_document(scene);
    sc.push_back(std::move(s));
  }
  doc["scenes"] = std::move(sc);

  const auto path = sidecar_path(container);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << doc.dump(1) << '\n';
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

DatasetManifest read_manifest(const std::filesystem::path& container) {
  const auto path = sidecar_path(container);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    const Json doc = Json::parse(in);
    return manifest_from_document(doc.at("manifest"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed sidecar '" + path.string() + "': " + e.what());
  }
}

void write_dataset(const std::vector<SequenceRecord>& records, const std::filesystem::path& path,
                   const DatasetManifest& manifest) {
  for (const auto& r : records) check_grid(r.sequence.grid(), manifest.grid);
  ContainerWriter writer(path, manifest.grid, ContainerKind::dataset, records.size(),
                         manifest_to_json(manifest));
  std::vector<RecordSummary> summaries;
  std::map<std::uint64_t, MuscleScene> scenes;
  for (const auto& r : records) {
    writer.append(r);
    summaries.push_back({r.scene_index, r.snr_db, r.signal_power, r.truths.size()});
    scenes.emplace(r.scene_index, r.scene);
  }
  writer.finalize();
  write_sidecar(path, manifest, summaries, scenes);
}

SequenceRecord read_record(const std::filesystem::path& path, std::size_t index) {
  return ContainerReader(path).read_record(index);
}

// ---------------------------------------------------------------------------
// Augmentation

FlipMode flip_mode_for(std::size_t augmented_index) {
  return static_cast<FlipMode>(augmented_index % 4);
}

namespace {

template <typename T>
void flip_volume(Volume<T>& v, bool horizontal, bool vertical) {
  if (v.size() == 0) return;
  const GridSpec& g = v.grid();
  Volume<T> out(g);
  for (int k = 0; k < g.frames; ++k) {
    for (int i = 0; i < g.height_px; ++i) {
      const int si = vertical ? g.height_px - 1 - i : i;
      for (int j = 0; j < g.width_px; ++j) {
        const int sj = horizontal ? g.width_px - 1 - j : j;
        out.at(k, i, j) = v.at(k, si, sj);
      }
    }
  }
  v = std::move(out);
}

TerritoryMask flip_mask(const TerritoryMask& m, bool horizontal, bool vertical) {
  TerritoryMask out(m.width(), m.height());
  for (int i = 0; i < m.height(); ++i) {
    for (int j = 0; j < m.width(); ++j) {
      const int si = vertical ? m.height() - 1 - i : i;
      const int sj = horizontal ? m.width() - 1 - j : j;
      if (m.get(si, sj)) out.set(i, j);
    }
  }
  return out;
}

}  // namespace

SequenceRecord augment_flip(const SequenceRecord& record, FlipMode mode) {
  if (mode == FlipMode::none) return record;
  const bool h = mode == FlipMode::horizontal || mode == FlipMode::both;
  const bool v = mode == FlipMode::vertical || mode == FlipMode::both;
  SequenceRecord out = record;
  flip_volume(out.sequence, h, v);
  if (out.clean) flip_volume(*out.clean, h, v);
  for (auto& t : out.truths) t.mask = flip_mask(t.mask, h, v);
  for (auto& u : out.scene.units) {
    if (h) u.center.x_mm = out.scene.fov_width_mm - u.center.x_mm;
    if (v) u.center.y_mm = out.scene.fov_height_mm - u.center.y_mm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

void export_signals_csv(const SequenceRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "frame,time_s";
  for (const auto& t : record.truths) out << ",unit_" << t.unit_id;
  out << '\n';
  const std::size_t frames = record.truths.empty() ? 0 : record.truths.front().signal.size();
  const double rate = record.sequence.size() ? record.sequence.grid().frame_rate_hz : GridSpec{}.frame_rate_hz;
  char buf[64];
  for (std::size_t k = 0; k < frames; ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f", k, static_cast<double>(k) / rate);
    out << buf;
    for (const auto& t : record.truths) {
      std::snprintf(buf, sizeof buf, ",%.9g", static_cast<double>(t.signal[k]));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

void export_frame_pgm(const SequenceRecord& record, int frame, const std::filesystem::path& path) {
  const GridSpec& g = record.sequence.grid();
  if (record.sequence.size() == 0 || frame < 0 || frame >= g.frames) {
    throw ParameterError("frame " + std::to_string(frame) + " is not in the sequence");
  }
  const auto values = record.sequence.frame(frame);
  float peak = 0.0f;
  for (const float v : values) peak = std::max(peak, std::fabs(v));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "P5\n" << g.width_px << ' ' << g.height_px << "\n255\n";
  for (const float v : values) {
    const double scaled = peak > 0.0f ? 127.5 + 127.5 * static_cast<double>(v) / peak : 127.5;
    out.put(static_cast<char>(static_cast<std::uint8_t>(std::clamp(std::lround(scaled), 0L, 255L))));
  }
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

}  // namespace muvsim
