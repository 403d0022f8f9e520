#include "muvsim/sequence_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "muvsim/errors.hpp"

namespace muvsim {

void validate_grid(const GridSpec& grid) {
  if (grid.width_px <= 0 || grid.height_px <= 0 || grid.frames <= 0 || !(grid.px_mm > 0.0) ||
      !(grid.frame_rate_hz > 0.0)) {
    throw ParameterError("grid dimensions, pixel size and frame rate must be positive");
  }
}

StoredSequence to_stored(const VelocitySequence& seq) {
  StoredSequence out(seq.grid());
  std::transform(seq.data().begin(), seq.data().end(), out.data().begin(),
                 [](double v) { return static_cast<float>(v); });
  return out;
}

std::size_t TerritoryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

TerritoryMask rasterize_territory(Point2 center, double diameter_mm, const GridSpec& grid) {
  validate_grid(grid);
  const double r = 0.5 * diameter_mm;
  constexpr double eps = 1e-9;  // mm; absorbs rounding in sampled centers
  if (!(diameter_mm >= 0.0) || center.x_mm - r < -eps || center.y_mm - r < -eps ||
      center.x_mm + r > grid.fov_width_mm() + eps || center.y_mm + r > grid.fov_height_mm() + eps) {
    throw ParameterError("territory circle lies outside the field of view");
  }
  TerritoryMask mask(grid.width_px, grid.height_px);
  const double r2 = r * r;
  // Only rows/columns whose centers can fall inside the circle.
  const int row_lo = std::max(0, static_cast<int>(std::floor((center.y_mm - r) / grid.px_mm)) - 1);
  const int row_hi =
      std::min(grid.height_px - 1, static_cast<int>(std::ceil((center.y_mm + r) / grid.px_mm)));
  const int col_lo = std::max(0, static_cast<int>(std::floor((center.x_mm - r) / grid.px_mm)) - 1);
  const int col_hi =
      std::min(grid.width_px - 1, static_cast<int>(std::ceil((center.x_mm + r) / grid.px_mm)));
  for (int i = row_lo; i <= row_hi; ++i) {
    const double dy = grid.row_center_mm(i) - center.y_mm;
    for (int j = col_lo; j <= col_hi; ++j) {
      const double dx = grid.column_center_mm(j) - center.x_mm;
      if (dx * dx + dy * dy <= r2) mask.set(i, j);
    }
  }
  return mask;
}

std::vector<double> unit_signal(const MotorUnitSpec& unit, const GridSpec& grid) {
  std::vector<double> s(static_cast<std::size_t>(grid.frames), 0.0);
  for (const double t_f : unit.firing.times_s) {
    for (int k = 0; k < grid.frames; ++k) {
      const double dt = k / grid.frame_rate_hz - t_f;
      if (dt < 0.0) continue;
      s[static_cast<std::size_t>(k)] += twitch_velocity(dt, unit.twitch);
    }
  }
  return s;
}

RenderedScene render_scene(const MuscleScene& scene, const GridSpec& grid) {
  validate_grid(grid);
  RenderedScene out{VelocitySequence(grid), {}};
  out.truths.reserve(scene.units.size());
  auto& data = out.sequence.data();
  const std::size_t pixels = grid.pixels();

  for (const auto& unit : scene.units) {
    GroundTruthRecord truth;
    truth.unit_id = unit.id;
    truth.mask = rasterize_territory(unit.center, unit.diameter_mm, grid);
    truth.firing = unit.firing;
    const std::vector<double> s = unit_signal(unit, grid);
    truth.signal.assign(s.size(), 0.0f);
    std::transform(s.begin(), s.end(), truth.signal.begin(),
                   [](double v) { return static_cast<float>(v); });

    std::vector<std::size_t> covered;
    const auto& cells = truth.mask.cells();
    for (std::size_t p = 0; p < pixels; ++p) {
      if (cells[p]) covered.push_back(p);
    }
    for (int k = 0; k < grid.frames; ++k) {
      const double v = s[static_cast<std::size_t>(k)];
      if (v == 0.0) continue;
      double* frame = data.data() + static_cast<std::size_t>(k) * pixels;
      for (const std::size_t p : covered) frame[p] += v;
    }
    out.truths.push_back(std::move(truth));
  }
  return out;
}

double signal_power(const VelocitySequence& seq) {
  if (seq.size() == 0) return 0.0;
  const double sum_sq = std::transform_reduce(seq.data().begin(), seq.data().end(), 0.0,
                                              std::plus<>(), [](double v) { return v * v; });
  return sum_sq / static_cast<double>(seq.size());
}

VelocitySequence add_noise(const VelocitySequence& seq, double snr_db, Rng& rng,
                           const NoiseOptions& options) {
  if (std::isnan(snr_db) || snr_db <= 0.0) {
    throw ParameterError("SNR must be positive (use inf for noise-free)");
  }
  if (std::isinf(snr_db)) return seq;

  const double power = signal_power(seq);
  if (power == 0.0) {
    if (options.allow_zero_signal) return seq;
    throw ParameterError("cannot calibrate noise on an all-zero sequence");
  }
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  VelocitySequence out = seq;
  for (double& v : out.data()) v += sigma * rng.normal();
  return out;
}

}  // namespace muvsim
