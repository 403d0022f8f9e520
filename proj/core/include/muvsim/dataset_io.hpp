#pragma once

// MUVD container: random-access binary storage for labeled velocity
// sequences and for decomposition predictions, plus a JSON sidecar.
//
// Layout (all little-endian):
//   header   64 bytes   "MUVD", version, endianness, scalar type, kind,
//                        finalized flag, grid, record count, metadata length,
//                        header CRC, total file size
//   metadata            UTF-8 text (JSON), metadata-length bytes
//   offsets             per record: offset, labels length, frames length,
//                        labels CRC-32, frames CRC-32 (32 bytes)
//   records             labels section then frames section; frames are
//                        float32 frame-major, masks bit-packed row-major
//                        (LSB first), signals float32 per frame

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "muvsim/muscle_model.hpp"
#include "muvsim/sequence_synth.hpp"

namespace muvsim {

inline constexpr std::uint16_t kFormatVersion = 1;

enum class ContainerKind : std::uint8_t { dataset = 0, predictions = 1 };
enum class Split { train, validation, test };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

struct DatasetManifest {
  Split split = Split::test;
  std::size_t sequence_count = 0;  // distinct scenes
  std::size_t record_count = 0;    // scenes x noise levels
  GridSpec grid;
  std::vector<double> noise_levels_db;
  std::uint64_t seed = 0;
  std::uint32_t format_version = kFormatVersion;
  std::map<int, std::size_t> category_histogram;  // unit count -> scenes
  std::string config_json;  // generation config, verbatim
};

struct SequenceRecord {
  std::uint64_t scene_index = 0;
  double snr_db = kNoiseFree;
  double signal_power = 0.0;  // clean mean square, the SNR reference
  StoredSequence sequence;    // noisy, as stored
  std::optional<StoredSequence> clean;
  std::vector<GroundTruthRecord> truths;
  MuscleScene scene;

  friend bool operator==(const SequenceRecord&, const SequenceRecord&) = default;
};

struct PredictedUnit {
  int id = 0;
  TerritoryMask mask;
  float score = 1.0f;
  std::vector<float> signal;
  friend bool operator==(const PredictedUnit&, const PredictedUnit&) = default;
};

struct PredictionRecord {
  std::uint64_t sequence_index = 0;  // dataset record this predicts
  std::vector<PredictedUnit> units;
  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// Streams records into a container whose record count is fixed up front.
/// The file is only readable after finalize().
class ContainerWriter {
 public:
  ContainerWriter(const std::filesystem::path& path, const GridSpec& grid, ContainerKind kind,
                  std::uint64_t record_count, std::string metadata = {});
  ~ContainerWriter();
  ContainerWriter(const ContainerWriter&) = delete;
  ContainerWriter& operator=(const ContainerWriter&) = delete;

  void append(const SequenceRecord& record);
  void append(const PredictionRecord& record);
  void finalize();

  [[nodiscard]] std::uint64_t written() const { return written_; }

 private:
  struct Entry {
    std::uint64_t offset = 0;
    std::uint64_t labels_len = 0;
    std::uint64_t frames_len = 0;
    std::uint32_t labels_crc = 0;
    std::uint32_t frames_crc = 0;
  };

  void append_bytes(const std::vector<std::uint8_t>& labels,
                    const std::vector<std::uint8_t>& frames);

  std::filesystem::path path_;
  std::ofstream out_;
  GridSpec grid_;
  ContainerKind kind_;
  std::uint64_t record_count_;
  std::string metadata_;
  std::vector<Entry> entries_;
  std::uint64_t written_ = 0;
  std::uint64_t cursor_ = 0;
  bool finalized_ = false;
};

/// Validates the whole container on open: header, checksum, offsets and file
/// size. Record payload checksums are verified on every read.
class ContainerReader {
 public:
  explicit ContainerReader(const std::filesystem::path& path);

  [[nodiscard]] ContainerKind kind() const { return kind_; }
  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] const std::string& metadata() const { return metadata_; }

  [[nodiscard]] SequenceRecord read_record(std::size_t index) const;
  /// Scene, truths and SNR only; the sequence payload is left empty.
  [[nodiscard]] SequenceRecord read_labels(std::size_t index) const;
  [[nodiscard]] PredictionRecord read_prediction(std::size_t index) const;

  /// Flip-augmented view: index a maps to record a / 4 with flip mode a % 4.
  [[nodiscard]] std::size_t augmented_size() const { return 4 * size(); }
  [[nodiscard]] SequenceRecord read_augmented(std::size_t augmented_index) const;

 private:
  struct Entry {
    std::uint64_t offset = 0;
    std::uint64_t labels_len = 0;
    std::uint64_t frames_len = 0;
    std::uint32_t labels_crc = 0;
    std::uint32_t frames_crc = 0;
  };

  std::vector<std::uint8_t> read_section(std::uint64_t offset, std::uint64_t len,
                                         std::uint32_t crc, std::size_t index) const;
  const Entry& entry(std::size_t index) const;
  SequenceRecord read_dataset_record(std::size_t index, bool with_frames) const;

  std::filesystem::path path_;
  mutable std::ifstream in_;
  mutable std::mutex mutex_;
  ContainerKind kind_ = ContainerKind::dataset;
  GridSpec grid_;
  std::string metadata_;
  std::vector<Entry> entries_;
};

/// Writes `<path>` and its sidecar `<path>.json`.
void write_dataset(const std::vector<SequenceRecord>& records, const std::filesystem::path& path,
                   const DatasetManifest& manifest);

SequenceRecord read_record(const std::filesystem::path& path, std::size_t index);

std::filesystem::path sidecar_path(const std::filesystem::path& container);

struct RecordSummary {
  std::uint64_t scene_index = 0;
  double snr_db = kNoiseFree;
  double signal_power = 0.0;
  std::size_t n_units = 0;
};

/// Sidecar: manifest, per-record summary and each distinct scene once.
void write_sidecar(const std::filesystem::path& container, const DatasetManifest& manifest,
                   const std::vector<RecordSummary>& records,
                   const std::map<std::uint64_t, MuscleScene>& scenes);
DatasetManifest read_manifest(const std::filesystem::path& container);
std::string manifest_to_json(const DatasetManifest& manifest);

enum class FlipMode { none = 0, horizontal = 1, vertical = 2, both = 3 };

FlipMode flip_mode_for(std::size_t augmented_index);

/// Mirrors the sequence, every mask and every scene center about the chosen
/// axes. Horizontal flips columns (x), vertical flips rows (y).
SequenceRecord augment_flip(const SequenceRecord& record, FlipMode mode);

/// Ground-truth signals as CSV: frame, time, one column per unit.
void export_signals_csv(const SequenceRecord& record, const std::filesystem::path& path);

/// One frame as an 8-bit binary PGM, zero velocity at mid-gray.
void export_frame_pgm(const SequenceRecord& record, int frame, const std::filesystem::path& path);

}  // namespace muvsim
