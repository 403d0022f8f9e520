#pragma once

// Stochastic scene descriptions of active motor units: territories, firing
// trains, cross-unit synchronization and the per-firing twitch waveform.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "muvsim/rng.hpp"

namespace muvsim {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
  [[nodiscard]] double width() const { return hi - lo; }
  friend bool operator==(const Range&, const Range&) = default;
};

struct Point2 {
  double x_mm = 0.0;
  double y_mm = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Displacement twitch g(t) = P (t/T) exp(1 - t/T); velocity is its derivative.
struct TwitchParams {
  double peak_displacement = 1.0;  // P, arbitrary displacement units
  double contraction_time_s = 0.075;  // T, time to peak displacement
  friend bool operator==(const TwitchParams&, const TwitchParams&) = default;
};

struct FiringTrain {
  std::vector<double> times_s;  // strictly ascending, in [0, duration)
  double nominal_rate_hz = 0.0;
  friend bool operator==(const FiringTrain&, const FiringTrain&) = default;
};

struct MotorUnitSpec {
  int id = 0;
  Point2 center;
  double diameter_mm = 0.0;
  TwitchParams twitch;
  FiringTrain firing;
  friend bool operator==(const MotorUnitSpec&, const MotorUnitSpec&) = default;
};

struct MuscleScene {
  std::vector<MotorUnitSpec> units;
  double fov_width_mm = 40.0;
  double fov_height_mm = 40.0;
  double duration_s = 1.0;
  double sync_fraction = 0.0;
  friend bool operator==(const MuscleScene&, const MuscleScene&) = default;
};

struct FiringOptions {
  double ipi_cv = 0.2;           // IPI std = ipi_cv / FR
  double refractory_s = 0.020;   // minimum IPI; shorter draws are resampled
  double first_firing_s = -1.0;  // < 0: uniform in [0, 1/FR)
};

enum class AmplitudeMode { uniform, size_principle };

struct MuscleConfig {
  Range firing_rate_hz{8.0, 13.0};
  FiringOptions firing;
  Range diameter_mm{2.5, 10.0};
  Range peak_displacement{0.5, 1.5};
  AmplitudeMode amplitude_mode = AmplitudeMode::uniform;
  Range contraction_time_s{0.050, 0.100};
  Range sync_fraction{0.0, 0.10};  // drawn once per scene
  double sync_jitter_s = 0.002;
  double fov_width_mm = 40.0;
  double fov_height_mm = 40.0;
  double duration_s = 1.0;
};

inline constexpr double kMaxSyncFraction = 0.10;

FiringTrain sample_firing_train(Rng& rng, Range fr_range_hz, double duration_s,
                                const FiringOptions& options = {});

struct SyncOutcome {
  std::vector<FiringTrain> trains;
  std::size_t moved = 0;         // firings snapped onto another unit
  bool single_train_noop = false;  // sync requested with fewer than two trains
};

/// Each firing is, with probability `sync_fraction`, moved onto the nearest
/// firing of one uniformly chosen other unit plus N(0, jitter_s) and the
/// refractory floor is re-enforced. Only firings that are not moved
/// themselves serve as targets.
SyncOutcome apply_synchronization(const std::vector<FiringTrain>& trains, double sync_fraction,
                                  Rng& rng, double duration_s, double refractory_s = 0.020,
                                  double jitter_s = 0.002);

struct Territory {
  Point2 center;
  double diameter_mm = 0.0;
};

Territory sample_territory(Rng& rng, double fov_width_mm, double fov_height_mm,
                           Range diameter_mm);

/// (P/T) e^(1 - t/T) (1 - t/T) for t >= 0, zero before the firing.
double twitch_velocity(double t_s, const TwitchParams& params);

/// Displacement g(t) = P (t/T) e^(1 - t/T); the antiderivative of twitch_velocity.
double twitch_displacement(double t_s, const TwitchParams& params);

MuscleScene build_scene(Rng& rng, int n_units, const MuscleConfig& config = {});

/// Unit count for training/validation scenes, uniform over [lo, hi].
int sample_unit_count(Rng& rng, int lo = 5, int hi = 30);

/// Throws ParameterError naming the first violated invariant.
void validate_scene(const MuscleScene& scene, const MuscleConfig& config = {});

/// Structured text (JSON) form of a scene; byte-stable for equal scenes.
std::string scene_to_json(const MuscleScene& scene, int indent = 2);
MuscleScene scene_from_json(const std::string& text);

}  // namespace muvsim
