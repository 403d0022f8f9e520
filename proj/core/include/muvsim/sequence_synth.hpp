#pragma once

// Rasterization of muscle scenes into tissue-velocity image sequences with
// per-unit ground truth.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "muvsim/muscle_model.hpp"
#include "muvsim/rng.hpp"

namespace muvsim {

struct GridSpec {
  int width_px = 64;
  int height_px = 64;
  double px_mm = 0.625;
  int frames = 400;
  double frame_rate_hz = 400.0;

  [[nodiscard]] double fov_width_mm() const { return width_px * px_mm; }
  [[nodiscard]] double fov_height_mm() const { return height_px * px_mm; }
  [[nodiscard]] double duration_s() const { return frames / frame_rate_hz; }
  [[nodiscard]] std::size_t pixels() const {
    return static_cast<std::size_t>(width_px) * static_cast<std::size_t>(height_px);
  }
  [[nodiscard]] std::size_t voxels() const { return pixels() * static_cast<std::size_t>(frames); }

  /// Pixel-center coordinates in mm; columns run along x, rows along y.
  [[nodiscard]] double column_center_mm(int col) const { return (col + 0.5) * px_mm; }
  [[nodiscard]] double row_center_mm(int row) const { return (row + 0.5) * px_mm; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws ParameterError for nonpositive dimensions or rates.
void validate_grid(const GridSpec& grid);

/// frames x height x width scalar field, frame-major.
template <typename T>
class Volume {
 public:
  Volume() = default;
  explicit Volume(const GridSpec& grid) : grid_(grid), data_(grid.voxels(), T{}) {}

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  T& at(int frame, int row, int col) { return data_[index(frame, row, col)]; }
  [[nodiscard]] const T& at(int frame, int row, int col) const {
    return data_[index(frame, row, col)];
  }

  [[nodiscard]] std::span<T> frame(int k) {
    return {data_.data() + static_cast<std::size_t>(k) * grid_.pixels(), grid_.pixels()};
  }
  [[nodiscard]] std::span<const T> frame(int k) const {
    return {data_.data() + static_cast<std::size_t>(k) * grid_.pixels(), grid_.pixels()};
  }

  std::vector<T>& data() { return data_; }
  [[nodiscard]] const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  [[nodiscard]] std::size_t index(int frame, int row, int col) const {
    return (static_cast<std::size_t>(frame) * static_cast<std::size_t>(grid_.height_px) +
            static_cast<std::size_t>(row)) *
               static_cast<std::size_t>(grid_.width_px) +
           static_cast<std::size_t>(col);
  }

  GridSpec grid_;
  std::vector<T> data_;
};

/// Synthesis works in double; containers store float32.
using VelocitySequence = Volume<double>;
using StoredSequence = Volume<float>;

StoredSequence to_stored(const VelocitySequence& seq);

class TerritoryMask {
 public:
  TerritoryMask() = default;
  TerritoryMask(int width_px, int height_px)
      : width_(width_px), height_(height_px),
        bits_(static_cast<std::size_t>(width_px) * static_cast<std::size_t>(height_px), 0) {}

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] bool get(int row, int col) const { return bits_[offset(row, col)] != 0; }
  void set(int row, int col, bool on = true) { bits_[offset(row, col)] = on ? 1 : 0; }
  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] bool empty() const { return count() == 0; }
  /// Row-major cells, 0 or 1.
  [[nodiscard]] const std::vector<std::uint8_t>& cells() const { return bits_; }

  friend bool operator==(const TerritoryMask&, const TerritoryMask&) = default;

 private:
  [[nodiscard]] std::size_t offset(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct GroundTruthRecord {
  int unit_id = 0;
  TerritoryMask mask;
  std::vector<float> signal;  // twitch-train velocity at t = k / frame_rate
  FiringTrain firing;
  friend bool operator==(const GroundTruthRecord&, const GroundTruthRecord&) = default;
};

/// Pixel set iff its center lies within diameter/2 of `center`.
TerritoryMask rasterize_territory(Point2 center, double diameter_mm, const GridSpec& grid);

/// s[k] = sum over firings of twitch_velocity(k / frame_rate - t_f).
std::vector<double> unit_signal(const MotorUnitSpec& unit, const GridSpec& grid);

struct RenderedScene {
  VelocitySequence sequence;
  std::vector<GroundTruthRecord> truths;
};

/// Linear superposition: voxel (k, i, j) sums, in unit order, the signals of
/// every unit whose mask covers (i, j).
RenderedScene render_scene(const MuscleScene& scene, const GridSpec& grid);

struct NoiseOptions {
  // All-zero input with finite SNR: error by default, or emit no noise.
  bool allow_zero_signal = false;
};

inline constexpr double kNoiseFree = std::numeric_limits<double>::infinity();

/// Mean square over all voxels; the SNR reference power.
double signal_power(const VelocitySequence& seq);

/// Adds i.i.d. N(0, power / 10^(snr/10)) to every voxel; +inf returns a copy.
VelocitySequence add_noise(const VelocitySequence& seq, double snr_db, Rng& rng,
                           const NoiseOptions& options = {});

}  // namespace muvsim
